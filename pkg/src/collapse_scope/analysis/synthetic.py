"""Seeded synthetic fringe data standing in for a measured KDTL scan."""
from __future__ import annotations

import numpy as np

from ..core import CollapseParams, InterferometerSpec, MoleculeSpec, Model
from ..talbot import pattern
from .fitting import FringeData

RNG_NAME = "numpy.random.PCG64"


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def synthetic_fringes(spec: InterferometerSpec, mol: MoleculeSpec, p: CollapseParams = None, *,
                      n_points: int = 100, periods: int = 2, mean_count: float = 1e4,
                      visibility_uncertainty: float = 0.1, seed: int = 0, N: int = 16) -> FringeData:
    """Noisy samples of a reference pattern, equally spaced over whole periods.

    Each sample carries Gaussian noise with standard deviation
    ``visibility_uncertainty * V * mean_count``, i.e. a fixed fraction of
    the fringe amplitude. The reference is quantum mechanics (lambda = 0)
    unless ``p`` says otherwise.
    """
    if p is None:
        p = CollapseParams(Model.CSL, 0.0, 1e-7)
    x = np.arange(n_points) * periods * spec.d / n_points
    ref = pattern(spec, mol, p, x, N)
    s0 = ref.coefficient(0).real
    clean = mean_count * ref.S / s0
    sigma = visibility_uncertainty * ref.visibility * mean_count
    noise = rng(seed).standard_normal(n_points) * sigma
    counts = np.maximum(clean + noise, 0.0)
    return FringeData(x, counts, np.full(n_points, sigma),
                      source=f"synthetic seed={seed} rng={RNG_NAME} rel_unc={visibility_uncertainty}")
