"""Checks on the Gaussian jump-operator construction of the dissipative model.

The jump operator ``J(p, Q) = N exp(-(a1 Q + a2 p)^2)`` leaves the Gibbs
state ``exp(-beta p^2 / 2m)`` stationary iff

    Q^0:  a1^2 b^2 + 2 a1 a2 b p = 0
    Q^1:  2 a2^2 p + 2 a1^2 b + beta p / (2m) = 0
    Q^2:  -2 a2^2 + 4 a1 a2 - beta / (2m) = 0

with ``b = -2 (a2/a1) p``. Everything is one-dimensional: Gaussian integrands
factor over Cartesian axes, so the 3-D integrals are cubes of 1-D ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import HBAR, K_B, M0, DomainError, NumericalError
from .quadrature import integrate

# Gaussian tails beyond this many standard widths are below 1e-60
_WIDTHS = 12.0


@dataclass(frozen=True)
class JOperatorParams:
    a1: float  # (kg m/s)^-1
    a2: float  # (kg m/s)^-1
    N: float
    k_T: float
    beta: float  # 1/J
    m: float
    r_C: float
    lam: float

    def perturbed(self, a2_factor: float) -> "JOperatorParams":
        return replace(self, a2=self.a2 * a2_factor)


def derive_j_params(m: float, r_C: float, T: float, lam: float) -> JOperatorParams:
    if not (m > 0 and r_C > 0 and T > 0 and lam > 0):
        raise DomainError(f"m, r_C, T and lambda must be > 0, got {m!r}, {r_C!r}, {T!r}, {lam!r}")
    kt = HBAR**2 / (8.0 * m * r_C**2 * K_B * T)
    c = r_C / (math.sqrt(2.0) * HBAR)
    N = math.sqrt(lam * (m / M0) ** 2 * (r_C / (math.sqrt(math.pi) * HBAR)) ** 3)
    return JOperatorParams(a1=(1.0 + kt) * c, a2=2.0 * kt * c, N=N, k_T=kt, beta=1.0 / (K_B * T),
                           m=m, r_C=r_C, lam=lam)


def j_operator(params: JOperatorParams, p, Q):
    """J evaluated on momentum eigenvalues ``p`` and transfers ``Q`` (1-D)."""
    return params.N * np.exp(-(params.a1 * np.asarray(Q) + params.a2 * np.asarray(p)) ** 2)


def thermal_momentum(params: JOperatorParams) -> float:
    return math.sqrt(params.m / params.beta)


def check_q_conditions(params: JOperatorParams, p_ref: float = None):
    """Residuals of the Q^0, Q^1, Q^2 conditions, each relative to its largest term.

    At large ``k_T`` the Q^2 terms are about ``k_T`` times ``beta/(2m)`` and
    cancel down to it, so a residual relative to ``beta/(2m)`` would only
    measure the rounding of ``a1`` and ``a2``. Dividing by the largest term
    keeps the check at machine precision while a perturbed ``a2`` still shows
    up at the size of the perturbation.
    """
    a1, a2 = params.a1, params.a2
    if a1 == 0:
        raise DomainError("a1 = 0: the ansatz is degenerate")
    scale = params.beta / (2.0 * params.m)
    if p_ref is None:
        p_ref = thermal_momentum(params)
    b = -2.0 * (a2 / a1) * p_ref
    terms = (
        [a1 * a1 * b * b, 2.0 * a1 * a2 * b * p_ref],
        [2.0 * a2 * a2 * p_ref, 2.0 * a1 * a1 * b, scale * p_ref],
        [-2.0 * a2 * a2, 4.0 * a1 * a2, -scale],
    )
    out = []
    for t in terms:
        size = max(abs(x) for x in t)
        out.append(abs(math.fsum(t)) / size if size else 0.0)
    return tuple(out)


def b_zero_a2_squared(params: JOperatorParams) -> float:
    """``a2^2`` implied by the Q^1 condition on the rejected ``b = 0`` branch."""
    return -params.beta / (4.0 * params.m)


def _gaussian_window(A, B):
    """Centre and half-width of exp(-A Q^2 + B Q + C) for integration."""
    if A <= 0:
        raise NumericalError(f"integrand is not a decaying Gaussian (quadratic coefficient {A!r})")
    return B / (2.0 * A), _WIDTHS / math.sqrt(A)


def stationarity_sides(params: JOperatorParams, p: float, *, rel_tol=1e-12, abs_tol=0.0):
    """Both sides of the 1-D Gibbs-stationarity integral identity at momentum ``p``.

    Integrands are evaluated relative to their peak exponent so the
    quadrature sees O(1) values; the common factor is restored afterwards.
    """
    a1, a2, bm = params.a1, params.a2, params.beta / (2.0 * params.m)

    def lhs_exp(Q):
        return -2.0 * (a1 * Q + a2 * (p - Q)) ** 2 - bm * (p - Q) ** 2

    def rhs_exp(Q):
        return -2.0 * (a1 * Q + a2 * p) ** 2 - bm * p * p

    out = []
    for fexp, A, B in (
        (lhs_exp, 2.0 * (a1 - a2) ** 2 + bm, -4.0 * (a1 - a2) * a2 * p + 2.0 * bm * p),
        (rhs_exp, 2.0 * a1 * a1, -4.0 * a1 * a2 * p),
    ):
        centre, half = _gaussian_window(A, B)
        peak = fexp(centre)
        res = integrate(lambda Q: np.exp(fexp(Q) - peak), centre - half, centre + half,
                        rel_tol=rel_tol, abs_tol=abs_tol, max_intervals=2000)
        out.append((float(res.value.real) if isinstance(res.value, complex) else float(res.value), peak))
    (lv, lp), (rv, rp) = out
    # common scale: the larger peak
    top = max(lp, rp)
    return lv * math.exp(lp - top), rv * math.exp(rp - top)


def check_gibbs_stationarity(params: JOperatorParams, p_grid, *, rel_tol=1e-12) -> float:
    """Max relative deviation ``|LHS - RHS| / RHS`` over ``p_grid``."""
    p_grid = np.asarray(p_grid, dtype=float)
    worst = 0.0
    for p in p_grid:
        lhs, rhs = stationarity_sides(params, float(p), rel_tol=rel_tol)
        if not rhs > 0:
            raise NumericalError(f"right-hand side vanished at p={p!r}")
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst


def default_p_grid(params: JOperatorParams, points: int = 41, span: float = 5.0):
    return np.linspace(-span, span, points) * thermal_momentum(params)


def cross_check_2d(params: JOperatorParams, p_vec=(1.0, -0.5), *, rel_tol=1e-8) -> float:
    """Relative gap between a 2-D LHS integral and the product of 1-D integrals.

    ``p_vec`` is in units of the thermal momentum.
    """
    pt = thermal_momentum(params)
    px, py = (v * pt for v in p_vec)
    a1, a2, bm = params.a1, params.a2, params.beta / (2.0 * params.m)
    A = 2.0 * (a1 - a2) ** 2 + bm

    def exps(Q, p):
        return -2.0 * (a1 * Q + a2 * (p - Q)) ** 2 - bm * (p - Q) ** 2

    cx, hx = _gaussian_window(A, -4.0 * (a1 - a2) * a2 * px + 2.0 * bm * px)
    cy, hy = _gaussian_window(A, -4.0 * (a1 - a2) * a2 * py + 2.0 * bm * py)
    px_peak, py_peak = exps(cx, px), exps(cy, py)

    def inner(qx_values):
        out = np.empty(np.shape(qx_values))
        for i, qx in enumerate(np.atleast_1d(qx_values)):
            r = integrate(lambda qy: np.exp(exps(qx, px) - px_peak + exps(qy, py) - py_peak),
                          cy - hy, cy + hy, rel_tol=rel_tol, abs_tol=0.0)
            out[i] = float(np.real(r.value))
        return out

    two_d = integrate(inner, cx - hx, cx + hx, rel_tol=rel_tol, abs_tol=0.0).value
    fx = integrate(lambda q: np.exp(exps(q, px) - px_peak), cx - hx, cx + hx, rel_tol=rel_tol, abs_tol=0.0).value
    fy = integrate(lambda q: np.exp(exps(q, py) - py_peak), cy - hy, cy + hy, rel_tol=rel_tol, abs_tol=0.0).value
    return float(abs(two_d - fx * fy) / abs(fx * fy))


def verification_report(m: float, r_C: float, T: float, lam: float, *, points: int = 41) -> dict:
    """Residuals and stationarity deviations for one parameter set, JSON-ready."""
    params = derive_j_params(m, r_C, T, lam)
    pt = thermal_momentum(params)
    grid = default_p_grid(params, points)
    q0, q1, q2 = check_q_conditions(params)
    falsified = check_gibbs_stationarity(params.perturbed(1.1), [2.0 * pt])
    return {
        "inputs": {"m_kg": m, "r_C_m": r_C, "T_K": T, "lambda_per_s": lam},
        "params": {"a1": params.a1, "a2": params.a2, "N": params.N, "k_T": params.k_T, "beta": params.beta},
        "q_residuals": {"Q0": q0, "Q1": q1, "Q2": q2},
        "b_zero_branch_a2_squared": b_zero_a2_squared(params),
        "gibbs_max_rel_deviation": check_gibbs_stationarity(params, grid),
        "gibbs_grid_thermal_momenta": [float(grid[0] / pt), float(grid[-1] / pt), int(points)],
        "perturbed_a2_x1.1_deviation_at_2p_th": falsified,
        "cross_check_2d_rel_gap": cross_check_2d(params),
    }
