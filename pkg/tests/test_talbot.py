import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.special import jv

from collapse_scope.core import (BinaryAmplitude, CollapseParams, CustomGrating, DomainError, Model,
                                 NumericalError, SinusoidalPhase, TruncationError)
from collapse_scope.kernels import d_function
from collapse_scope.talbot import (PatternModel, coefficient_array, grating_coefficients, pattern,
                                   pattern_velocity_averaged, talbot_coefficients, visibility_from_terms)
from oracles import binary_coefficients_fft


def test_binary_mean_transmission():
    assert grating_coefficients(BinaryAmplitude(0.5), 3)[0] == 0.5


def test_phase_grating_zero_amplitude():
    c = grating_coefficients(SinusoidalPhase(0.0), 5)
    assert c[0] == 1 and all(v == 0 for n, v in c.items() if n != 0)


def test_binary_parseval_and_fft():
    f = 0.42
    c = coefficient_array(BinaryAmplitude(f), 200)
    assert abs(np.sum(np.abs(c) ** 2) - f) < 1e-3
    ref = binary_coefficients_fft(f, 20)
    assert np.max(np.abs(coefficient_array(BinaryAmplitude(f), 20) - ref)) < 1e-4


def test_phase_grating_coefficients_by_fft():
    phi = 3.0
    x = np.arange(4096) / 4096
    trans = np.exp(1j * phi / 2 * np.cos(2 * np.pi * x))
    c = np.fft.fft(trans) / x.size
    n = np.arange(-12, 13)
    assert np.max(np.abs(coefficient_array(SinusoidalPhase(phi), 12) - c[n % x.size])) < 1e-13


@pytest.mark.parametrize("phi", [0.5, 3.0, 7.0])
def test_talbot_coefficients_phase_grating_bessel(phi):
    for m in range(-6, 7):
        for xi in (0.0, 0.1, 0.557, 1.3, 2.25):
            ref = jv(m, phi * math.sin(math.pi * xi))
            assert talbot_coefficients(SinusoidalPhase(phi), m, xi) == pytest.approx(ref, abs=1e-13)


def _series(g, m, xi, K):
    b = coefficient_array(g, K)
    k = np.arange(-K, K + 1)
    ok = np.abs(k - m) <= K
    kk = k[ok]
    return np.sum(b[kk + K] * np.conj(b[kk - m + K]) * np.exp(1j * np.pi * (m - 2 * kk) * xi))


@pytest.mark.parametrize("f", [0.3, 0.42, 0.7])
def test_binary_talbot_against_long_series(f):
    g = BinaryAmplitude(f)
    for m in (-3, 0, 1, 4):
        for xi in (-0.8, 0.0, 0.2, 0.557, 1.5, 3.1):
            assert talbot_coefficients(g, m, xi) == pytest.approx(_series(g, m, xi, 100_000), abs=1e-5)


def test_talbot_coefficients_at_zero_distance_binary():
    # B_m(0) is the m-th coefficient of |t|^2 = t for a 0/1 grating
    g = BinaryAmplitude(0.3)
    for m in range(-5, 6):
        assert talbot_coefficients(g, m, 0.0) == pytest.approx(coefficient_array(g, 5)[m + 5], abs=1e-15)


def test_constant_pattern_single_term(spec, mol):
    flat = replace(spec, grating1=CustomGrating((0.5,)), grating2=CustomGrating((0.8,)),
                   grating3=CustomGrating((0.5,)))
    res = pattern(flat, mol, CollapseParams(Model.CSL, 0.0, 1e-7), np.linspace(0, spec.d, 9), mode="direct")
    assert np.allclose(res.S, 0.5 * 0.5 * 0.8, rtol=0, atol=1e-15)
    assert res.visibility == 0.0


def test_two_term_visibility_one():
    assert visibility_from_terms(np.array([-1, 0, 1]), np.array([0.5, 1.0, 0.5])) == 1.0


def test_terms_shrink_by_D(spec, mol):
    x = np.linspace(0, spec.d, 5)
    p = CollapseParams(Model.CSL, 1e-6, 1e-7)
    q = pattern(spec, mol, p, x, prefactor=0.0)
    c = pattern(spec, mol, p, x, prefactor=500.0)
    assert c.coefficient(0) == q.coefficient(0)
    for n in range(1, 6):
        D = d_function(2 * math.pi * n * spec.L / (spec.d * spec.k), spec, p, 500.0, mol.mass)
        assert abs(c.coefficient(n)) == pytest.approx(abs(q.coefficient(n)) * abs(D), rel=1e-12)
        assert abs(c.coefficient(n)) <= abs(q.coefficient(n))


def test_visibility_monotone_and_bounded(spec, mol):
    x = np.linspace(0, spec.d, 4, endpoint=False)
    p = CollapseParams(Model.CSL, 1.0, 1e-7)
    lams = np.logspace(-9, -3, 10)
    V0 = pattern(spec, mol, p, x, prefactor=0.0).visibility
    vis = []
    for lam in lams:
        res = pattern(spec, mol, p.with_lambda(lam), x)
        assert res.coefficient(0) == pattern(spec, mol, p, x, prefactor=0.0).coefficient(0)
        vis.append(res.visibility)
        assert res.visibility / V0 >= math.exp(-res.prefactor * (spec.t1 + spec.t2)) * (1 - 1e-12)
    assert np.all(np.diff(vis) <= 0)


def test_kdtl_quantum_visibility(spec, mol):
    # frozen value, cross-checked against the Bessel closed form of the phase-grating Talbot coefficients
    res = pattern(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), [0.0])
    xi = spec.L / spec.talbot_length
    a = coefficient_array(spec.grating1, 1)
    bessel = [jv(2 * n, 3.0 * math.sin(math.pi * n * xi)) for n in (0, 1)]
    V_two_terms = 2 * abs(a[2] ** 2 * bessel[1]) / abs(a[1] ** 2 * bessel[0])
    assert res.visibility == pytest.approx(V_two_terms, rel=1e-12)
    assert res.visibility == pytest.approx(0.5230, abs=1e-3)


def test_order_doubling_converged(spec, mol):
    x = np.linspace(0, 2 * spec.d, 50)
    p = CollapseParams(Model.CSL, 1e-7, 1e-7)
    a = pattern(spec, mol, p, x, 16).S
    b = pattern(spec, mol, p, x, 32).S
    assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(b))


def test_truncation_error(spec, mol):
    wide = replace(spec, grating2=SinusoidalPhase(60.0))
    with pytest.raises(TruncationError):
        PatternModel(wide, mol, CollapseParams(Model.CSL, 0.0, 1e-7), 4, max_order=8)


def test_bad_mode(spec, mol):
    with pytest.raises(DomainError):
        PatternModel(spec, mol, CollapseParams(Model.CSL, 0.0, 1e-7), mode="fourier")


def test_imaginary_residue_is_reported(spec, mol):
    skew = replace(spec, grating2=CustomGrating((0.3j, 1.0, 0.1)))
    with pytest.raises(NumericalError):
        pattern(skew, mol, CollapseParams(Model.CSL, 0.0, 1e-7), np.linspace(0, spec.d, 7), mode="direct")


def test_velocity_average_single_velocity(spec, mol):
    x = np.linspace(0, spec.d, 11)
    p = CollapseParams(Model.CSL, 1e-7, 1e-7)
    avg = pattern_velocity_averaged(spec, mol, p, x, [100.0], [1.0])
    ref = pattern(spec, mol, p, x)
    assert np.allclose(avg.S, ref.S, rtol=1e-14, atol=0)
    two = pattern_velocity_averaged(spec, mol, p, x, [95.0, 105.0], [1.0, 1.0])
    assert 0 <= two.visibility <= 1.5
