"""Where the coloured and dissipative kernels stay close to plain CSL.

Dissipation margins compare ``hbar^2/(m r_C^2)``, ``hbar dx/(r_C t)`` and
``hbar dx u_x / r_C^2`` with ``8 k_B T``; the memory margin compares
``k_B T_sys tau_C`` with ``hbar``. A condition holds when its margin is below
the threshold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core import HBAR, K_B, CollapseParams, DomainError, InterferometerSpec, MoleculeSpec

DEFAULT_THRESHOLD = 0.01


@dataclass(frozen=True)
class ValidityReport:
    margins: Tuple[float, float, float]
    tau_C_margin: Optional[float]
    threshold: float

    @property
    def ok(self) -> Tuple[bool, bool, bool]:
        return tuple(bool(m < self.threshold) for m in self.margins)

    @property
    def tau_C_ok(self) -> Optional[bool]:
        return None if self.tau_C_margin is None else bool(self.tau_C_margin < self.threshold)


def dissipation_margins(mass, r_C, T, delta_x, flight_time, u_x):
    """The three margins; broadcasts over array arguments."""
    scale = 8.0 * K_B * np.asarray(T, dtype=float)
    first = HBAR**2 / (mass * np.asarray(r_C) ** 2) / scale
    second = HBAR * delta_x / (np.asarray(r_C) * flight_time) / scale
    third = HBAR * delta_x * np.abs(u_x) / np.asarray(r_C) ** 2 / scale
    return first, second, third


def tau_margin(tau_C, system_temperature):
    return K_B * np.asarray(system_temperature, dtype=float) * np.asarray(tau_C, dtype=float) / HBAR


def validity_report(spec: InterferometerSpec, mol: MoleculeSpec, p: CollapseParams, delta_x: float,
                    system_temperature: float, threshold: float = DEFAULT_THRESHOLD) -> ValidityReport:
    """Margins for one configuration. The flight time is ``t1 + t2``."""
    if p.T is None or not p.T > 0:
        raise DomainError(f"validity report needs a noise temperature T > 0, got {p.T!r}")
    if not delta_x > 0 or not system_temperature > 0:
        raise DomainError("delta_x and system_temperature must be > 0")
    m = dissipation_margins(mol.mass, p.r_C, p.T, delta_x, spec.t1 + spec.t2, p.u_x)
    tm = None if p.tau_C is None else float(tau_margin(p.tau_C, system_temperature))
    return ValidityReport(tuple(float(v) for v in m), tm, threshold)


def tau_C_limit(system_temperature, margin: float = 1.0):
    """Correlation time at which the memory margin equals ``margin``."""
    return margin * HBAR / (K_B * np.asarray(system_temperature, dtype=float))


def region_rT(mass, delta_x, flight_time, r_C_grid, T_grid, threshold=DEFAULT_THRESHOLD):
    """Rows ``(r_C, T, margin1, margin2, region)`` over an (r_C, T) grid.

    ``region`` is ``both``, ``first``, ``second`` or ``none`` by which of the
    first two conditions hold.
    """
    rows = []
    for r in r_C_grid:
        for T in T_grid:
            m1, m2, _ = dissipation_margins(mass, r, T, delta_x, flight_time, 0.0)
            ok1, ok2 = m1 < threshold, m2 < threshold
            region = "both" if ok1 and ok2 else "first" if ok1 else "second" if ok2 else "none"
            rows.append((float(r), float(T), float(m1), float(m2), region))
    return rows


def boundary_temperatures(mass, delta_x, flight_time, r_C, threshold=DEFAULT_THRESHOLD):
    """Temperatures above which the first and second conditions hold."""
    r = np.asarray(r_C, dtype=float)
    t1 = HBAR**2 / (mass * r**2) / (8.0 * K_B * threshold)
    t2 = HBAR * delta_x / (r * flight_time) / (8.0 * K_B * threshold)
    return t1, t2


def region_ru(delta_x, r_C_grid, u_grid, threshold=DEFAULT_THRESHOLD):
    """Rows ``(r_C, u_x, T_min)``: the lowest T meeting the velocity condition."""
    rows = []
    for r in r_C_grid:
        for u in u_grid:
            T_min = HBAR * delta_x * abs(u) / r**2 / (8.0 * K_B * threshold)
            rows.append((float(r), float(u), float(T_min)))
    return rows
