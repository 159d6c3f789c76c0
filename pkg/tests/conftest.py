import numpy as np
import pytest

from koon_gphcs.censoring import CensoringPlan, ProgressiveSample, apply_gphcs_rule
from koon_gphcs.datasets import load_dataset

AIRCON_PROGRESSIVE = [1, 3, 5, 7, 11, 14, 16, 20, 23, 42, 47, 52, 62, 71, 87, 90, 95,
                      120, 225, 246]
AIRCON_REMOVALS = [2] * 5 + [0] * 15
# (k, T) settings of the real-data study
REAL_SETTINGS = {"I": (12, 80.0), "II": (13, 100.0), "III": (14, 120.0)}

_acceptance_lines = []


def record_acceptance(criterion, passed, detail):
    _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def aircon():
    return load_dataset("bundled:aircon").times


def real_plan(setting):
    k, T = REAL_SETTINGS[setting]
    return CensoringPlan(30, 20, k, T, AIRCON_REMOVALS)


def real_sample(setting):
    plan = real_plan(setting)
    return apply_gphcs_rule(ProgressiveSample(AIRCON_PROGRESSIVE, plan), plan)


@pytest.fixture(params=sorted(REAL_SETTINGS))
def real_setting(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
