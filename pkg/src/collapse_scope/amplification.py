"""Centre-of-mass collapse rate of a rigid molecule.

    Lambda = (n_A / n(r_C)) * (m_A n(r_C) / m0)^2 * lambda

with ``n(r_C)`` the (fractional) number of atoms inside a region of linear
size ``r_C``, assuming homogeneous density over the molecule geometry.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import M0, CollapseParams, Disk, DomainError, MoleculeSpec, PointCluster, Sphere


class Regime(str, enum.Enum):
    BELOW_ATOMIC = "below_atomic"  # fewer than one atom within r_C
    INTERMEDIATE = "intermediate"
    ABOVE_MOLECULE = "above_molecule"  # whole molecule within r_C


@dataclass(frozen=True)
class AmplificationResult:
    Lambda: float
    n_rC: float
    regime: Regime


def n_of_rc(mol: MoleculeSpec, r_C):
    """Atoms within ``r_C``, clamped to ``[1, n_A]``; broadcasts over ``r_C``."""
    r = np.asarray(r_C, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError(f"r_C must be > 0, got {r_C!r}")
    g = mol.geometry
    if isinstance(g, Sphere):
        n = mol.n_A * np.minimum(1.0, (r / g.radius) ** 3)
    elif isinstance(g, Disk):
        n = mol.n_A * np.minimum(1.0, (r / g.radius) ** 2)
    elif isinstance(g, PointCluster):
        n = np.full_like(r, float(mol.n_A))
    else:
        raise DomainError(f"unsupported geometry {g!r}")
    n = np.clip(n, 1.0, mol.n_A)
    return n if n.ndim else float(n)


def unit_rate(mol: MoleculeSpec, r_C):
    """Centre-of-mass rate per unit single-nucleon rate (Lambda at lambda = 1)."""
    n = np.asarray(n_of_rc(mol, r_C))
    out = mol.n_A * n * (mol.m_A / M0) ** 2
    return out if out.ndim else float(out)


def regime(mol: MoleculeSpec, r_C: float) -> Regime:
    n = n_of_rc(mol, r_C)
    if n >= mol.n_A:
        return Regime.ABOVE_MOLECULE
    if n <= 1.0:
        return Regime.BELOW_ATOMIC
    return Regime.INTERMEDIATE


def effective_rate(mol: MoleculeSpec, p: CollapseParams) -> AmplificationResult:
    n = n_of_rc(mol, p.r_C)
    lam_cm = (mol.n_A / n) * (mol.m_A * n / M0) ** 2 * p.lam
    return AmplificationResult(Lambda=float(lam_cm), n_rC=float(n), regime=regime(mol, p.r_C))
