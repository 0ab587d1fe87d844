import math
from dataclasses import replace

import numpy as np
import pytest

from collapse_scope.analysis import FringeData, exclusion_scan, lambda_min_for, rate_profile, synthetic_fringes
from collapse_scope.analysis.exclusion import THREADS_ENV, thread_cap
from collapse_scope.core import AMU, CollapseParams, DomainError, Model, MoleculeSpec, NumericalError, Sphere
from collapse_scope.core import de_broglie_wavenumber
from collapse_scope.talbot import pattern


class _Profile:
    def __init__(self, f):
        self.f = f

    def chi2(self, lam):
        return self.f(lam)


def test_bisection_on_known_profile():
    # chi2 = 1e12 * lambda crosses 9 at lambda = 9e-12
    lam = lambda_min_for(_Profile(lambda lam: 1e12 * lam))
    assert 9e-12 <= lam <= 9e-12 * 10**0.01 * 1.0000001


def test_unbounded_and_fully_excluded():
    assert lambda_min_for(_Profile(lambda lam: 0.0)) == math.inf
    assert math.isnan(lambda_min_for(_Profile(lambda lam: 0.0 if lam == 0 else 100.0)))


def test_non_monotone_profile_raises():
    def bumpy(lam):
        return 0.0 if lam < 1e-9 else (100.0 if lam > 1 else 200.0)

    with pytest.raises(NumericalError, match="monotone"):
        lambda_min_for(_Profile(bumpy))


def test_kdtl_lambda_min(spec, mol):
    data = synthetic_fringes(spec, mol, seed=2026)
    lam = lambda_min_for(rate_profile(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), data))
    assert 1e-7 <= lam <= 1e-5


def test_heavier_molecule_is_more_sensitive(spec, mol):
    heavy = MoleculeSpec(mol.n_A, 2 * mol.m_A, mol.geometry)
    heavy_spec = replace(spec, k=de_broglie_wavenumber(heavy.mass, 100.0))
    p = CollapseParams(Model.CSL, 0.0, 1e-7)
    light = lambda_min_for(rate_profile(spec, mol, p, synthetic_fringes(spec, mol, seed=1)))
    heavier = lambda_min_for(rate_profile(heavy_spec, heavy, p, synthetic_fringes(heavy_spec, heavy, seed=1)))
    assert heavier < light


def test_noiseless_data_still_finite(spec, mol):
    x = np.arange(100) * 2 * spec.d / 100
    ref = pattern(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), x)
    counts = 1e4 * ref.S / ref.coefficient(0).real
    data = FringeData(x, counts, np.full(x.size, 0.1 * ref.visibility * 1e4))
    lam = lambda_min_for(rate_profile(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), data))
    assert 0 < lam < math.inf


def test_chi2_monotone_in_lambda(spec, mol):
    # seed 5 data sit above the quantum visibility, so chi2 rises from lambda = 0
    data = synthetic_fringes(spec, mol, seed=5)
    prof = rate_profile(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), data)
    chi = [prof.chi2(lam) for lam in np.logspace(-9, -3, 25)]
    assert np.all(np.diff(chi) >= -1e-9 * np.max(chi))


def test_scan_kinks_at_regime_changes(spec, mol):
    data = synthetic_fringes(spec, mol, seed=2026)
    grid = np.logspace(-11, -5, 31)
    curve = exclusion_scan(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), data, grid, threads=1)
    slope = np.diff(np.log10(curve.lambda_min)) / np.diff(np.log10(grid))
    jumps = set(np.nonzero(np.abs(np.diff(slope)) > 2.0)[0] + 1)
    changes = {i for i in range(1, grid.size) if curve.regimes[i] != curve.regimes[i - 1]}
    assert changes and jumps
    assert all(min(abs(j - c) for c in changes) <= 1 for j in jumps)
    assert all(min(abs(j - c) for j in jumps) <= 1 for c in changes)


def test_scan_threads_deterministic(spec, mol):
    data = synthetic_fringes(spec, mol, seed=3)
    grid = np.logspace(-9, -6, 8)
    p = CollapseParams(Model.CSL, 0.0, 1e-7)
    a = exclusion_scan(spec, mol, p, data, grid, threads=1)
    b = exclusion_scan(spec, mol, p, data, grid, threads=4)
    assert np.array_equal(a.lambda_min, b.lambda_min) and a.regimes == b.regimes


def test_scan_grid_validation(spec, mol):
    data = synthetic_fringes(spec, mol, seed=3)
    p = CollapseParams(Model.CSL, 0.0, 1e-7)
    with pytest.raises(DomainError):
        exclusion_scan(spec, mol, p, data, [1e-7, 1e-8])
    with pytest.raises(DomainError):
        exclusion_scan(spec, mol, p, data, [])


def test_thread_cap_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_cap() == 3
    for bad in ("0", "-2", "many"):
        monkeypatch.setenv(THREADS_ENV, bad)
        with pytest.raises(DomainError):
            thread_cap()
