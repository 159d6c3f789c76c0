"""Loading failure-time data files and the bundled examples."""

import math
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ParseError

BUNDLED = {
    "aircon": "aircon.txt",
    "aircon-progressive": "aircon_progressive.txt",
}
DESIGNS = ("table1_block1", "table1", "table3", "extra_cell")
_TOKEN = re.compile(r"[^\s,]+")


@dataclass(frozen=True, eq=False)
class Dataset:
    times: np.ndarray
    label: str
    source: str

    def __len__(self):
        return int(self.times.size)


def parse_times(text, source="<string>"):
    """Positive reals separated by commas and/or whitespace; ``#`` starts a comment."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        for match in _TOKEN.finditer(body):
            tok = match.group()
            col = match.start() + 1
            try:
                value = float(tok)
            except ValueError:
                raise ParseError(f"not a number: {tok!r}", lineno, col, source) from None
            if not math.isfinite(value) or value <= 0.0:
                raise ParseError(f"failure times must be finite and > 0, got {tok!r}",
                                 lineno, col, source)
            values.append(value)
    if not values:
        raise ParseError("no failure times found", source=source)
    return np.array(values)


def _bundled_text(filename):
    return resources.files("koon_gphcs").joinpath("data", filename).read_text("utf-8")


def load_dataset(path_or_bundled) -> Dataset:
    """Read a data file, or a bundled dataset given as ``bundled:<name>``."""
    spec = str(path_or_bundled)
    if spec.startswith("bundled:"):
        name = spec.split(":", 1)[1]
        if name not in BUNDLED:
            raise ParseError(f"unknown bundled dataset {name!r}; "
                             f"available: {', '.join(sorted(BUNDLED))}")
        times = parse_times(_bundled_text(BUNDLED[name]), spec)
        return Dataset(times, name, spec)
    try:
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read data file: {exc.strerror}", source=spec) from None
    return Dataset(parse_times(text, spec), spec, spec)


def design_path(name):
    if name not in DESIGNS:
        raise ParseError(f"unknown bundled design {name!r}; available: {', '.join(DESIGNS)}")
    return resources.files("koon_gphcs").joinpath("data", "designs", f"{name}.json")
