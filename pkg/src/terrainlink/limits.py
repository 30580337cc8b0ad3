"""Validity ranges of the TIREM input variables.

Each entry maps the TIREM variable name to ``(low, high, low_open)``.
``high`` may be ``None`` for an unbounded range; ``low_open`` marks an
exclusive lower bound (the antenna heights are ">0").
"""

import math

from .errors import RangeError

TIREM_RANGES = {
    "CONDUC": (1e-5, 100.0, False),
    "HPRFL": (-450.0, 9000.0, False),
    "HUMID": (0.0, 50.0, False),
    "NPRFL": (3, None, False),
    "PERMIT": (1.0, 100.0, False),
    "PROPFQ": (1.0, 20000.0, False),
    "RANTHT": (0.0, 30000.0, True),
    "REFRAC": (200.0, 450.0, False),
    "TANTHT": (0.0, 30000.0, True),
    "XPRFL": (0.0, None, False),
}

UNITS = {
    "CONDUC": "S/m",
    "HPRFL": "m",
    "HUMID": "g/m^3",
    "NPRFL": "points",
    "PERMIT": "",
    "PROPFQ": "MHz",
    "RANTHT": "m",
    "REFRAC": "N-units",
    "TANTHT": "m",
    "XPRFL": "m",
}


def check_range(variable: str, value):
    """Raise :class:`RangeError` unless ``value`` is valid for ``variable``."""
    low, high, low_open = TIREM_RANGES[variable]
    unit = UNITS[variable]
    if isinstance(value, float) and not math.isfinite(value):
        raise RangeError(variable, value, f"{value} is not finite")
    if value < low or (low_open and value == low):
        op = ">" if low_open else ">="
        raise RangeError(variable, value, f"{value} {unit} violates {op} {low}".replace("  ", " "))
    if high is not None and value > high:
        raise RangeError(variable, value, f"{value} {unit} exceeds {high}".replace("  ", " "))
    return value
