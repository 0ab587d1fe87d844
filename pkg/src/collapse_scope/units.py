"""Parsing of ``"<number> <unit>"`` strings into SI floats and back."""
from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation

from .core import AMU, DomainError

_UNITS = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "micron": 1e-6,
               "nm": 1e-9, "pm": 1e-12, "A": 1e-10, "Å": 1e-10, "angstrom": 1e-10, "km": 1e3},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15},
    "mass": {"kg": 1.0, "g": 1e-3, "amu": AMU, "u": AMU, "Da": AMU},
    "temperature": {"K": 1.0, "mK": 1e-3, "uK": 1e-6, "µK": 1e-6, "nK": 1e-9, "pK": 1e-12},
    "rate": {"1/s": 1.0, "s^-1": 1.0, "Hz": 1.0, "/s": 1.0},
    "velocity": {"m/s": 1.0, "km/s": 1e3, "mm/s": 1e-3},
    "angle": {"rad": 1.0, "mrad": 1e-3},
    "wavenumber": {"1/m": 1.0, "rad/m": 1.0, "m^-1": 1.0},
    "dimensionless": {"": 1.0},
}

SI_UNIT = {"length": "m", "time": "s", "mass": "kg", "temperature": "K", "rate": "1/s",
           "velocity": "m/s", "angle": "rad", "wavenumber": "rad/m", "dimensionless": ""}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf|nan)\s*(.*?)\s*$")


def parse_quantity(text, kind: str) -> float:
    """``"266 nm"`` -> 2.66e-7. Bare numbers are taken as SI."""
    if kind not in _UNITS:
        raise DomainError(f"unknown quantity kind {kind!r}")
    if isinstance(text, (int, float)):
        return float(text)
    match = _NUMBER.match(str(text))
    if not match:
        raise DomainError(f"cannot parse {text!r} as a {kind}")
    number, unit = match.group(1), match.group(2)
    table = _UNITS[kind]
    if unit == "":
        return float(number)
    if unit not in table:
        raise DomainError(f"bad unit {unit!r} for a {kind}; expected one of {sorted(k for k in table if k)}")
    factor = table[unit]
    exponent = Decimal(repr(factor)).adjusted()
    if factor == 10.0**exponent:
        # decimal prefixes: shift the exponent exactly instead of multiplying floats
        try:
            return float(Decimal(number).scaleb(exponent))
        except InvalidOperation:
            pass
    return float(number) * factor


def format_quantity(value: float, kind: str) -> str:
    """SI string that :func:`parse_quantity` reads back to the identical float."""
    unit = SI_UNIT[kind]
    return f"{value!r} {unit}".rstrip()
