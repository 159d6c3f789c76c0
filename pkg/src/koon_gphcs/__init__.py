"""Reliability inference for K-out-of-N:G systems of Weibull components from
generalized progressive hybrid censored life tests."""

from .bayes import (BayesResult, PosteriorSample, PriorSpec, credible_interval,
                    mh_sample, self_estimates)
from .censoring import (CensoringPlan, GphcsSample, ProgressiveSample, apply_gphcs_rule,
                        generate_gphcs, generate_progressive)
from .errors import GphcsError
from .frequentist import (FitResult, IntervalEstimate, aci_param, aci_reliability, fit,
                          ks_test, log_likelihood, mle_system_reliability, observed_info,
                          profile_beta, score)
from .koon import SystemSpec, system_reliability, system_reliability_gradient
from .weibull import WeibullParams

__version__ = "0.1.0"

__all__ = [
    "BayesResult", "CensoringPlan", "FitResult", "GphcsError", "GphcsSample",
    "IntervalEstimate", "PosteriorSample", "PriorSpec", "ProgressiveSample",
    "SystemSpec", "WeibullParams", "aci_param", "aci_reliability", "apply_gphcs_rule",
    "credible_interval", "fit", "generate_gphcs", "generate_progressive", "ks_test",
    "log_likelihood", "mh_sample", "mle_system_reliability", "observed_info",
    "profile_beta", "score", "self_estimates", "system_reliability",
    "system_reliability_gradient",
]
