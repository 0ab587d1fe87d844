"""Decoherence characteristic functions F(k, q, t) and the D function.

All three models share the form ``F = exp(prefactor * E(k, q, t))`` where the
exponent ``E`` does not depend on the collapse rate. Functions named
``*_exponent`` return ``E`` (units of seconds) so that callers scanning the
rate can evaluate it once; ``f_csl``/``f_dcsl``/``f_ccsl`` return ``F``.

The prefactor is the centre-of-mass rate (``lambda m^2/m0^2`` or the
geometry-amplified rate); the kernels never compute it themselves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special

from .core import HBAR, K_B, CollapseParams, DomainError, InterferometerSpec, Model
from .quadrature import integrate

SQRT_PI = math.sqrt(math.pi)
TAYLOR_THRESHOLD = 1e-6
UNDERFLOW_EXPONENT = -700.0
QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-10
MAX_PANELS = 10_000
# e^-80 ~ 2e-35: Gaussian envelope beyond this contributes nothing at QUAD_ABS_TOL
_ENVELOPE_CUT = 2.0 * math.sqrt(80.0)
# tau_C above this leaves the regime where the coloured-noise kernel applies
CCSL_TAU_LIMIT = 1e-13


@dataclass(frozen=True)
class KernelInput:
    k: float  # momentum-transfer argument, kg m/s
    q: float  # separation argument, m
    t: float  # s
    mass: float  # kg
    prefactor: float  # centre-of-mass collapse rate, 1/s


@dataclass(frozen=True)
class KernelValue:
    value: complex
    underflow: bool = False
    flags: Tuple[str, ...] = ()


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise DomainError(f"flight time must be >= 0, got {t!r}")


def safe_exp(z):
    """``exp(z)`` with real parts below -700 mapped to exactly 0.

    Returns ``(value, underflow_mask)``.
    """
    z = np.asarray(z)
    under = z.real < UNDERFLOW_EXPONENT
    with np.errstate(under="ignore"):
        v = np.exp(np.where(under, 0.0, z))
    v = np.where(under, 0.0, v)
    return v, under


def k_T(mass: float, r_C: float, T: float) -> float:
    """Dimensionless dissipation strength ``hbar^2 / (8 m r_C^2 k_B T)``."""
    if T <= 0:
        raise DomainError(f"noise temperature must be > 0, got {T!r}")
    return HBAR**2 / (8.0 * mass * r_C**2 * K_B * T)


def tau_bar(t: float, tau_C: float) -> float:
    """First moment of the exponential noise correlation over ``[0, t]``."""
    if t < 0 or tau_C < 0:
        raise DomainError(f"t and tau_C must be >= 0, got t={t!r}, tau_C={tau_C!r}")
    if tau_C == 0 or t == 0:
        return 0.0
    # 1 - e^{-z}(1 + z) is the regularised lower incomplete gamma P(2, z)
    return 0.5 * tau_C * float(special.gammainc(2.0, t / tau_C))


def _erf_diff(A, B):
    """erf(A) - erf(B) without cancellation in the tails."""
    both_pos = (A > 0) & (B > 0)
    both_neg = (A < 0) & (B < 0)
    plain = special.erf(A) - special.erf(B)
    upper = special.erfc(B) - special.erfc(A)
    lower = special.erfc(-A) - special.erfc(-B)
    return np.where(both_pos, upper, np.where(both_neg, lower, plain))


def csl_exponent(k, q, t, mass, r_C):
    """Exponent ``-(t - int_0^t exp(-(q - k tau/m)^2 / (4 r_C^2)) dtau)``.

    Closed form through the error function; second-order Taylor expansion in
    ``k`` when ``|k| t / (m r_C) <= 1e-6``. Broadcasts over array arguments.
    """
    k, q, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, q, t)))
    _check_time(t)
    a = k / mass
    shift = a * t  # total displacement k t / m
    small = np.abs(shift) <= TAYLOR_THRESHOLD * r_C
    q2 = q * q / (4.0 * r_C**2)
    g_q = np.exp(-q2)

    with np.errstate(divide="ignore", invalid="ignore"):
        A = (shift - q) / (2.0 * r_C)
        B = -q / (2.0 * r_C)
        integral = np.where(small, 0.0, r_C * SQRT_PI * _erf_diff(A, B) / np.where(small, 1.0, a))
        deficit_exact = t - integral

    corr = shift * q / (4.0 * r_C**2) + shift**2 / 6.0 * (q * q / (4.0 * r_C**4) - 1.0 / (2.0 * r_C**2))
    deficit_taylor = t * (-np.expm1(-q2) - g_q * corr)
    deficit = np.where(small, deficit_taylor, deficit_exact)
    # the time integral never exceeds t
    deficit = np.maximum(deficit, 0.0)
    out = -deficit
    return out if out.ndim else float(out)


def _dcsl_shape(mass, r_C, T, u_x):
    kt = k_T(mass, r_C, T)
    s = r_C * (1.0 + kt)
    beta = 2.0 * mass * kt * u_x / (HBAR * (1.0 + kt))
    return kt, s, beta


def _dcsl_antiderivative(y, s, beta):
    """Stable ``s sqrt(pi) e^{-s^2 beta^2} erf((y - 2 i s^2 beta) / (2 s))``."""
    z = (y - 2j * s * s * beta) / (2.0 * s)
    with np.errstate(under="ignore"):
        envelope = math.exp(-(s * beta) ** 2)
        local = np.exp(-(y * y) / (4.0 * s * s) + 1j * beta * y)
    if z.real >= 0:
        erf_part = envelope - local * special.wofz(1j * z)
    else:
        erf_part = -envelope + local * special.wofz(-1j * z)
    return s * SQRT_PI * erf_part


def dcsl_integral_closed(k, q, t, mass, r_C, T, u_x) -> complex:
    """Normalised dCSL time integral ``(1/t) int_0^t ... dtau`` via the Faddeeva function."""
    kt, s, beta = _dcsl_shape(mass, r_C, T, u_x)
    c0 = (k * r_C * kt / HBAR) ** 2
    a = k / mass
    if a * t == 0:
        return complex(math.exp(-c0 - q * q / (4 * s * s)) * np.exp(1j * beta * q))
    diff = _dcsl_antiderivative(q, s, beta) - _dcsl_antiderivative(q - a * t, s, beta)
    return complex(math.exp(-c0) * diff / (a * t))


def dcsl_integral(k, q, t, mass, r_C, T, u_x, *, rel_tol=QUAD_REL_TOL, abs_tol=QUAD_ABS_TOL) -> complex:
    """Normalised dCSL time integral by adaptive Gauss-Kronrod quadrature.

    The integration variable is ``u = tau / t``. The range is clipped to where
    the Gaussian envelope exceeds e^-80 and split into panels no longer than
    half an oscillation period. When that would need more than ``MAX_PANELS``
    panels the Faddeeva closed form is used instead.
    """
    if t < 0:
        raise DomainError(f"flight time must be >= 0, got {t!r}")
    kt, s, beta = _dcsl_shape(mass, r_C, T, u_x)
    c0 = (k * r_C * kt / HBAR) ** 2
    shift = k / mass * t
    if t == 0 or shift == 0:
        return complex(math.exp(-c0 - q * q / (4 * s * s)) * np.exp(1j * beta * q))
    if c0 > 80.0:
        return 0j

    # y(u) = q - shift * u ; keep |y| <= cut
    cut = _ENVELOPE_CUT * s
    u1, u2 = (q - cut) / shift, (q + cut) / shift
    lo, hi = max(0.0, min(u1, u2)), min(1.0, max(u1, u2))
    if lo >= hi:
        return 0j

    omega = abs(beta * shift)  # phase advance per unit u
    n_panels = int(math.ceil(omega * (hi - lo) / math.pi)) if omega > 0 else 1
    if n_panels > MAX_PANELS // 2:
        return dcsl_integral_closed(k, q, t, mass, r_C, T, u_x)
    breaks = np.linspace(lo, hi, n_panels + 1) if n_panels > 1 else None
    pref = math.exp(-c0)
    inv4s2 = 1.0 / (4.0 * s * s)
    bs = beta * shift

    # the constant phase beta*q is applied after integration to keep the
    # integrand free of large-argument round-off
    def integrand(u):
        y = q - shift * u
        return pref * np.exp(-y * y * inv4s2 - 1j * bs * u)

    res = integrate(integrand, lo, hi, abs_tol=abs_tol, rel_tol=rel_tol,
                    max_intervals=MAX_PANELS, breakpoints=breaks)
    return complex(res.value * np.exp(1j * beta * q))


def dcsl_exponent(k, q, t, mass, r_C, T, u_x, **quad_opts):
    """Complex exponent ``-t (1 - I/t)`` of the dissipative kernel; broadcasts."""
    k, q, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, q, t)))
    _check_time(t)
    out = np.empty(k.shape, dtype=complex)
    for idx in np.ndindex(k.shape):
        ti = float(t[idx])
        ratio = dcsl_integral(float(k[idx]), float(q[idx]), ti, mass, r_C, T, u_x, **quad_opts)
        out[idx] = -ti * (1.0 - ratio)
    return out if out.ndim else complex(out)


def ccsl_exponent(k, q, t, mass, r_C, tau_C):
    """CSL exponent plus the coloured-noise correction ``(tau_bar/2)(g(q - kt/m) - g(q))``."""
    k, q, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, q, t)))
    base = np.asarray(csl_exponent(k, q, t, mass, r_C))
    if tau_C == 0:
        return base if base.ndim else float(base)
    tb = np.vectorize(tau_bar, otypes=[float])(t, tau_C)
    g_end = np.exp(-((q - k * t / mass) ** 2) / (4.0 * r_C**2))
    g_start = np.exp(-(q * q) / (4.0 * r_C**2))
    out = base + 0.5 * tb * (g_end - g_start)
    return out if out.ndim else float(out)


def exponent(p: CollapseParams, k, q, t, mass):
    """Model-dispatched kernel exponent."""
    if p.model is Model.CSL:
        return csl_exponent(k, q, t, mass, p.r_C)
    if p.model is Model.DCSL:
        if p.T is None or p.T <= 0:
            raise DomainError(f"dCSL needs T > 0, got {p.T!r}")
        return dcsl_exponent(k, q, t, mass, p.r_C, p.T, p.u_x)
    if p.tau_C is None or p.tau_C < 0:
        raise DomainError(f"cCSL needs tau_C >= 0, got {p.tau_C!r}")
    return ccsl_exponent(k, q, t, mass, p.r_C, p.tau_C)


def _value(prefactor, e, flags=()):
    v, under = safe_exp(prefactor * e)
    return KernelValue(complex(v), bool(under), tuple(flags))


def f_csl(inp: KernelInput, p: CollapseParams) -> KernelValue:
    return _value(inp.prefactor, csl_exponent(inp.k, inp.q, inp.t, inp.mass, p.r_C))


def f_dcsl(inp: KernelInput, p: CollapseParams) -> KernelValue:
    if p.T is None or p.T <= 0:
        raise DomainError(f"dCSL needs T > 0, got {p.T!r}")
    e = dcsl_exponent(inp.k, inp.q, inp.t, inp.mass, p.r_C, p.T, p.u_x)
    return _value(inp.prefactor, e)


def f_ccsl(inp: KernelInput, p: CollapseParams) -> KernelValue:
    if p.tau_C is None or p.tau_C < 0:
        raise DomainError(f"cCSL needs tau_C >= 0, got {p.tau_C!r}")
    flags = ("tau_C outside coloured-noise validity",) if p.tau_C > CCSL_TAU_LIMIT else ()
    e = ccsl_exponent(inp.k, inp.q, inp.t, inp.mass, p.r_C, p.tau_C)
    return _value(inp.prefactor, e, flags)


def d_exponent(x, spec: InterferometerSpec, p: CollapseParams, mass: float):
    """Exponent of D(x): ``D = exp(prefactor * d_exponent)``; broadcasts over ``x``."""
    x = np.asarray(x, dtype=float)
    p_kick = HBAR * spec.k * x
    first = exponent(p, -p_kick / spec.L2, np.zeros_like(x), np.full_like(x, spec.t2), mass)
    second = exponent(p, p_kick / spec.L1, x, np.full_like(x, spec.t1), mass)
    return np.asarray(first) + np.asarray(second)


def d_function(x, spec: InterferometerSpec, p: CollapseParams, prefactor: float, mass: float):
    """D(x) = F(-hbar k x / L2, 0, t2) F(hbar k x / L1, x, t1)."""
    v, _ = safe_exp(prefactor * d_exponent(x, spec, p, mass))
    return v if v.ndim else complex(v)
