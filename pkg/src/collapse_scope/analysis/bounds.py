"""Classicality lower bound and the macroscopicity measure."""
from __future__ import annotations

import math

import numpy as np

from ..amplification import unit_rate
from ..core import AMU, M0, M_E, DomainError, Disk, MoleculeSpec

# Graphene: lattice constant 2.46 Angstrom, two carbon atoms per hexagonal cell
GRAPHENE_LATTICE = 2.46e-10
GRAPHENE_AREAL_DENSITY = 2.0 / (math.sqrt(3.0) / 2.0 * GRAPHENE_LATTICE**2)  # ~3.82e19 m^-2
CARBON_MASS = 12.0 * AMU

# Human-eye resolution and perception time used as the classicality criterion
CLASSICALITY_RADIUS = 1e-5
CLASSICALITY_TIME = 1e-2

ELECTRON_OFFSET = 2.0 * math.log10(M0 / M_E)


def graphene_disk(radius: float = CLASSICALITY_RADIUS) -> MoleculeSpec:
    """Single-layer graphene disk of the given radius."""
    n_atoms = GRAPHENE_AREAL_DENSITY * math.pi * radius**2
    return MoleculeSpec(n_A=n_atoms, m_A=CARBON_MASS, geometry=Disk(radius))


def classicality_bound(obj: MoleculeSpec, localization_time: float, r_C_grid, lambda_template=None):
    """Smallest lambda that localises ``obj`` within ``localization_time``.

    Solves ``Lambda(r_C) * t = 1`` for each ``r_C``. ``lambda_template`` is
    accepted for call symmetry with the scans; the criterion is the same for
    every model of the family.
    """
    if localization_time <= 0:
        raise DomainError(f"localization time must be > 0, got {localization_time!r}")
    rates = np.asarray(unit_rate(obj, np.asarray(r_C_grid, dtype=float)))
    return 1.0 / (rates * localization_time)


def macroscopicity(lambda_min: float) -> float:
    """``log10(1 / lambda_min) + 2 log10(m0 / m_e)``."""
    if not lambda_min > 0:
        raise DomainError(f"lambda_min must be > 0, got {lambda_min!r}")
    return -math.log10(lambda_min) + ELECTRON_OFFSET


def macroscopicity_forecast(t: float, m: float, f: float, *, electron_offset: bool = False) -> float:
    """Approximate macroscopicity of a time-of-flight experiment.

    ``log10(t) + 2 log10(m / m0) - log10|ln f|``. The bare formula lacks the
    ``2 log10(m0/m_e)`` offset of :func:`macroscopicity`; pass
    ``electron_offset=True`` to include it, which makes
    ``macroscopicity(1 / (t (m/m0)^2)) == macroscopicity_forecast(t, m, 1/e, electron_offset=True)``.
    """
    if not t > 0 or not m > 0:
        raise DomainError(f"t and m must be > 0, got t={t!r}, m={m!r}")
    if not 0 < f < 1:
        raise DomainError(f"visibility fraction must lie in (0, 1), got {f!r}")
    mu = math.log10(t) + 2.0 * math.log10(m / M0) - math.log10(abs(math.log(f)))
    return mu + ELECTRON_OFFSET if electron_offset else mu
