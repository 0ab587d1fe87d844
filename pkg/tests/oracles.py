"""Independent reference implementations used only by the tests."""
import math

import numpy as np
from scipy import integrate

from collapse_scope.core import M0


def adaptive_simpson(f, a, b, tol=1e-13, depth=60):
    """Classic recursive adaptive Simpson with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left, right = simpson(fa, flm, fm, a, m), simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def csl_time_integral(k, q, t, mass, r_C):
    """int_0^t exp(-(q - k tau / m)^2 / (4 r_C^2)) dtau by scipy quad, split at the Gaussian peak."""
    a = k / mass

    def g(tau):
        return math.exp(-((q - a * tau) ** 2) / (4.0 * r_C**2))

    points = None
    if a != 0:
        peak = q / a
        if 0 < peak < t:
            points = [peak]
    val, _ = integrate.quad(g, 0.0, t, epsabs=0.0, epsrel=1e-13, limit=500, points=points)
    return val


def csl_deficit_oracle(k, q, t, mass, r_C):
    """t - int g; evaluated as int (1 - g) to avoid cancellation."""
    a = k / mass

    def one_minus_g(tau):
        return -math.expm1(-((q - a * tau) ** 2) / (4.0 * r_C**2))

    points = None
    if a != 0 and 0 < q / a < t:
        points = [q / a]
    val, _ = integrate.quad(one_minus_g, 0.0, t, epsabs=0.0, epsrel=1e-13, limit=500, points=points)
    return val


def dcsl_integral_oracle(k, q, t, mass, r_C, T, u_x):
    """(1/t) int_0^t exp(-c0 - y^2/4s^2 + i beta y) dtau with y = q - k tau/m, real and imaginary parts separately."""
    from collapse_scope.core import HBAR, K_B

    kt = HBAR**2 / (8.0 * mass * r_C**2 * K_B * T)
    s = r_C * (1 + kt)
    beta = 2 * mass * kt * u_x / (HBAR * (1 + kt))
    c0 = (k * r_C * kt / HBAR) ** 2
    a = k / mass

    def env(tau):
        y = q - a * tau
        return math.exp(-c0 - y * y / (4 * s * s))

    # cos(beta (q - a tau)) = cos(beta q) cos(w tau) + sin(beta q) sin(w tau), w = beta a; QAWO handles the weights
    w = beta * a
    opts = dict(epsabs=1e-16, epsrel=1e-12, limit=2000)
    if w == 0:
        c = integrate.quad(env, 0, t, **opts)[0]
        return complex(c * math.cos(beta * q), c * math.sin(beta * q)) / t
    ic = integrate.quad(env, 0, t, weight="cos", wvar=w, **opts)[0]
    is_ = integrate.quad(env, 0, t, weight="sin", wvar=w, **opts)[0]
    cq, sq = math.cos(beta * q), math.sin(beta * q)
    re = cq * ic + sq * is_
    im = sq * ic - cq * is_
    return complex(re, im) / t


def binary_coefficients_fft(f, N, samples=1 << 16):
    """Fourier coefficients of a 0/1 slit of open fraction f from a sampled transmission function."""
    x = (np.arange(samples) + 0.5) / samples
    trans = (np.abs(x - 0.5) <= f / 2).astype(float)
    # slit centred at x = 0.5 -> shift back to centre at 0
    c = np.fft.fft(trans) / samples
    n = np.arange(-N, N + 1)
    return c[n % samples] * np.exp(1j * np.pi * n)


def brute_force_rate(n_A, m_A, n_rc, lam):
    """(n_A / n) (m_A n / m0)^2 lambda, term by term."""
    clusters = n_A / n_rc
    per_cluster_mass = m_A * n_rc
    return clusters * (per_cluster_mass / M0) ** 2 * lam
