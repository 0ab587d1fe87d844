import itertools
import math

import numpy as np
import pytest

from collapse_scope.cdcsl import (b_zero_a2_squared, check_gibbs_stationarity, check_q_conditions, cross_check_2d,
                                  default_p_grid, derive_j_params, j_operator, stationarity_sides,
                                  thermal_momentum, verification_report)
from collapse_scope.core import AMU, HBAR, DomainError

M = 10123 * AMU


def _gauss(A, B, C):
    return math.sqrt(math.pi / A) * math.exp(B * B / (4 * A) + C)


def test_high_temperature_limit():
    p = derive_j_params(M, 1e-7, 1e12, 1e-8)
    assert p.k_T < 1e-20
    assert p.a1 == pytest.approx(1e-7 / (math.sqrt(2) * HBAR), rel=1e-15)
    assert p.a2 / p.a1 < 1e-20


def test_k_T_shared_value():
    assert derive_j_params(M, 1e-7, 1.0, 1e-8).k_T == pytest.approx(5.9899158e-10, rel=1e-7)


def test_normalisation_square_root():
    a, b = derive_j_params(M, 1e-7, 1.0, 1e-8), derive_j_params(M, 1e-7, 1.0, 2e-8)
    assert b.N == pytest.approx(math.sqrt(2) * a.N, rel=1e-15)
    assert j_operator(a, 0.0, 0.0) == a.N


def test_domain():
    with pytest.raises(DomainError):
        derive_j_params(M, 1e-7, 0.0, 1e-8)


def test_q_residuals_on_grid():
    for m, r, T in itertools.product(np.logspace(-26, -20, 5), np.logspace(-9, -5, 5), np.logspace(-12, 3, 5)):
        assert max(check_q_conditions(derive_j_params(m, r, T, 1e-8))) < 1e-12


def test_perturbed_a2_breaks_q2():
    p = derive_j_params(M, 1e-7, 1e-9, 1e-8)
    q2 = check_q_conditions(p.perturbed(1.01))[2]
    assert 1e-3 < q2 < 0.1


def test_b_zero_branch_rejected():
    assert b_zero_a2_squared(derive_j_params(M, 1e-7, 1.0, 1e-8)) < 0


@pytest.mark.parametrize("T", [1e-12, 1e-9, 1.0])
def test_stationarity_sides_against_closed_form(T):
    p = derive_j_params(M, 1e-7, T, 1e-8)
    a1, a2, bm = p.a1, p.a2, p.beta / (2 * p.m)
    for mom in np.array([-3.0, 0.5, 2.0]) * thermal_momentum(p):
        lhs, rhs = stationarity_sides(p, mom)
        # LHS: exponent -2 (a1 Q + a2 (p - Q))^2 - bm (p - Q)^2; RHS: -2 (a1 Q + a2 p)^2 - bm p^2
        A1 = 2 * (a1 - a2) ** 2 + bm
        B1 = -4 * (a1 - a2) * a2 * mom + 2 * bm * mom
        C1 = -2 * a2 * a2 * mom * mom - bm * mom * mom
        A2, B2, C2 = 2 * a1 * a1, -4 * a1 * a2 * mom, -2 * a2 * a2 * mom * mom - bm * mom * mom
        ref_l, ref_r = _gauss(A1, B1, C1), _gauss(A2, B2, C2)
        assert lhs / rhs == pytest.approx(ref_l / ref_r, rel=1e-10)


def test_gibbs_identity_holds():
    for T in (1e-12, 1e-9, 1e-3, 1.0, 1e3):
        p = derive_j_params(M, 1e-7, T, 1e-8)
        assert check_gibbs_stationarity(p, default_p_grid(p, 41, 5.0)) < 1e-8


def test_deviation_even_in_momentum_for_any_a2():
    p = derive_j_params(M, 1e-7, 1e-9, 1e-8).perturbed(1.7)
    for mom in np.array([0.3, 1.0, 2.5]) * thermal_momentum(p):
        assert check_gibbs_stationarity(p, [mom]) == pytest.approx(check_gibbs_stationarity(p, [-mom]), rel=1e-8)


def test_zero_momentum_needs_q2_condition():
    # at p = 0 the sides are sqrt(pi / (2 (a1 - a2)^2 + bm)) and sqrt(pi / (2 a1^2))
    p = derive_j_params(M, 1e-7, 1e-9, 1e-8).perturbed(1.7)
    bm = p.beta / (2 * p.m)
    expect = abs(math.sqrt(2 * p.a1**2 / (2 * (p.a1 - p.a2) ** 2 + bm)) - 1)
    assert check_gibbs_stationarity(p, [0.0]) == pytest.approx(expect, rel=1e-8)


def test_wrong_a2_detected():
    p = derive_j_params(M, 1e-7, 1e-9, 1e-8)
    assert check_gibbs_stationarity(p.perturbed(1.1), [2 * thermal_momentum(p)]) > 1e-3


def test_deviation_tracks_quadrature_tolerance():
    p = derive_j_params(M, 1e-7, 1e-9, 1e-8)
    grid = default_p_grid(p, 11, 5.0)
    for tol in (1e-6, 1e-9, 1e-12):
        assert check_gibbs_stationarity(p, grid, rel_tol=tol) <= 10 * tol


def test_two_dimensional_factorisation():
    assert cross_check_2d(derive_j_params(M, 1e-7, 1e-9, 1e-8)) < 1e-7


def test_report_contents():
    rep = verification_report(M, 1e-7, 1e-9, 1e-8, points=11)
    assert max(rep["q_residuals"].values()) < 1e-12
    assert rep["gibbs_max_rel_deviation"] < 1e-8
    assert rep["perturbed_a2_x1.1_deviation_at_2p_th"] > 1e-3
    assert rep["b_zero_branch_a2_squared"] < 0
