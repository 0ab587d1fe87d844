"""Grating Fourier coefficients and the near-field fringe pattern.

The detector signal is

    S(x) = sum_n A*_n C*_n B_n D(2 pi n L / (d k)) exp(2 pi i n x / d)

with A, C the coefficients of the first and third grating. In the default
``mode="talbot"`` the middle-grating factor B_n is the generalised Talbot
coefficient ``B_{2n}(n L / L_T)`` built from the middle grating's amplitude
coefficients, ``L_T = d^2 k / (2 pi)``; ``mode="direct"`` uses the raw
coefficient of the middle grating as written in the series.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .amplification import effective_rate
from .core import (BinaryAmplitude, CollapseParams, CustomGrating, DomainError, InterferometerSpec,
                   MoleculeSpec, NumericalError, SinusoidalPhase, TruncationError, require_valid)
from .kernels import d_exponent, safe_exp

DEFAULT_ORDER = 16
MAX_ORDER = 1024
TRUNCATION_TOL = 1e-10
IMAG_TOL = 1e-8


def grating_coefficients(g, N: int) -> dict:
    """Fourier coefficients ``{n: c_n}`` of a grating transmission for ``|n| <= N``."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N!r}")
    n = np.arange(-N, N + 1)
    return dict(zip(n.tolist(), coefficient_array(g, N).tolist()))


def coefficient_array(g, N: int) -> np.ndarray:
    """Same as :func:`grating_coefficients` as an array indexed ``n + N``."""
    n = np.arange(-N, N + 1)
    if isinstance(g, BinaryAmplitude):
        f = g.open_fraction
        return (f * np.sinc(n * f)).astype(complex)
    if isinstance(g, SinusoidalPhase):
        return (1j ** (n % 4)) * special.jv(n, g.phase_amplitude / 2.0)
    if isinstance(g, CustomGrating):
        out = np.zeros(2 * N + 1, dtype=complex)
        M = g.order
        for idx, c in enumerate(g.coefficients):
            m = idx - M
            if abs(m) <= N:
                out[m + N] = c
        return out
    raise DomainError(f"unknown grating {g!r}")


def talbot_coefficients(g, orders, xi) -> np.ndarray:
    """Generalised Talbot coefficients ``B_m(xi) = sum_k b_k b*_{k-m} exp(i pi (m - 2k) xi)``.

    ``orders`` and ``xi`` are broadcast together. Binary gratings use the
    exact overlap form; their sinc coefficients decay too slowly to truncate.
    """
    orders, xi = np.broadcast_arrays(np.asarray(orders, dtype=int), np.asarray(xi, dtype=float))
    if isinstance(g, BinaryAmplitude):
        return _binary_talbot(g.open_fraction, orders, xi)
    K = int(np.max(np.abs(orders))) + 32
    b = coefficient_array(g, K)
    k = np.arange(-K, K + 1)
    out = np.empty(orders.shape, dtype=complex)
    for idx in np.ndindex(orders.shape):
        m = int(orders[idx])
        shifted = k - m
        ok = np.abs(shifted) <= K
        kk = k[ok]
        prod = b[kk + K] * np.conj(b[shifted[ok] + K])
        out[idx] = np.sum(prod * np.exp(1j * np.pi * (m - 2 * kk) * xi[idx]))
    return out


def _binary_talbot(f, orders, xi):
    """B_m(xi) for a 0/1 grating of open fraction ``f``.

    B_m(xi) is the m-th Fourier coefficient of t(x + xi d/2) t*(x - xi d/2):
    slits displaced by xi periods overlap on intervals of length
    ``max(0, f - |j - xi|)`` centred at ``j d / 2``.
    """
    out = np.zeros(orders.shape, dtype=complex)
    base = np.floor(xi)
    for shift in (-1, 0, 1, 2):
        j = base + shift
        ell = np.maximum(0.0, f - np.abs(j - xi))
        sign = np.where((orders * j.astype(np.int64)) % 2 == 0, 1.0, -1.0)
        out += ell * np.sinc(orders * ell) * sign
    return out


class PatternModel:
    """Fringe-series building blocks for one interferometer/molecule/model.

    The quantum coefficients and the collapse exponents are computed once;
    ``terms(prefactor)`` then costs one exponential per order, which is what
    the rate scans need.
    """

    def __init__(self, spec: InterferometerSpec, mol: MoleculeSpec, p: CollapseParams,
                 N: int = DEFAULT_ORDER, *, mode: str = "talbot",
                 truncation_tol: float = TRUNCATION_TOL, max_order: int = MAX_ORDER):
        require_valid(spec, mol, p)
        if mode not in ("talbot", "direct"):
            raise DomainError(f"mode must be 'talbot' or 'direct', got {mode!r}")
        self.spec, self.mol, self.params, self.mode = spec, mol, p, mode
        L = spec.L
        N = max(int(N), 1)
        while True:
            orders = np.arange(-N, N + 1)
            base = self._quantum_terms(orders, L)
            mags = np.abs(base)
            total = mags.sum()
            edge = mags[0] + mags[-1]
            if total == 0 or edge < truncation_tol * total:
                break
            if N >= max_order:
                raise TruncationError(
                    f"fringe series not converged at N={N}: edge terms {edge:.3e} vs total "
                    f"{total:.3e} (tolerance {truncation_tol:g}); gratings "
                    f"{spec.grating1!r}, {spec.grating2!r}, {spec.grating3!r}")
            N = min(2 * N, max_order)
        self.N = N
        self.orders = orders
        self.base = base
        self.positions = 2 * np.pi * orders * L / (spec.d * spec.k)
        self.exponents = np.asarray(d_exponent(self.positions, spec, p, mol.mass))

    def _quantum_terms(self, orders, L):
        N = int(orders.max())
        a = coefficient_array(self.spec.grating1, N)
        c = coefficient_array(self.spec.grating3, N)
        if self.mode == "talbot":
            xi = L / self.spec.talbot_length
            b = talbot_coefficients(self.spec.grating2, 2 * orders, orders * xi)
        else:
            b = coefficient_array(self.spec.grating2, N)
        return np.conj(a) * np.conj(c) * b

    def terms(self, prefactor: float) -> np.ndarray:
        damping, _ = safe_exp(prefactor * self.exponents)
        return self.base * damping

    def evaluate(self, x, prefactor: float, shift: float = 0.0) -> np.ndarray:
        """Complex S(x + shift)."""
        x = np.asarray(x, dtype=float) + shift
        phase = np.exp(2j * np.pi * np.outer(x, self.orders) / self.spec.d)
        return phase @ self.terms(prefactor)


@dataclass
class PatternResult:
    orders: np.ndarray
    terms: np.ndarray
    x: np.ndarray
    S: np.ndarray
    d: float
    prefactor: float
    visibility: float = field(default=float("nan"))

    @property
    def coefficients(self) -> dict:
        return dict(zip(self.orders.tolist(), self.terms.tolist()))

    @property
    def samples(self) -> list:
        return list(zip(self.x.tolist(), self.S.tolist()))

    def coefficient(self, n: int) -> complex:
        hit = np.nonzero(self.orders == n)[0]
        return complex(self.terms[hit[0]]) if hit.size else 0j

    def evaluate(self, x, shift: float = 0.0) -> np.ndarray:
        """Real pattern at arbitrary positions from the stored series."""
        x = np.asarray(x, dtype=float) + shift
        return (np.exp(2j * np.pi * np.outer(x, self.orders) / self.d) @ self.terms).real


def _real_pattern(values: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(values)) if values.size else 0.0
    if scale == 0:
        return values.real
    if np.max(np.abs(values.imag)) > IMAG_TOL * scale:
        raise NumericalError(
            f"fringe pattern has imaginary residue {np.max(np.abs(values.imag)):.3e} "
            f"relative to scale {scale:.3e}; check grating conjugation conventions or mode")
    S = values.real
    if np.min(S) < -IMAG_TOL * scale:
        raise NumericalError(f"fringe pattern negative ({np.min(S):.3e}); series truncation too coarse")
    return np.maximum(S, 0.0)


def visibility_from_terms(orders, terms) -> float:
    orders = np.asarray(orders)
    s0 = terms[orders == 0]
    s1 = terms[orders == 1]
    if s0.size == 0 or s0[0] == 0:
        raise DomainError("degenerate pattern: zero mean flux")
    first = abs(s1[0]) if s1.size else 0.0
    return float(2.0 * first / abs(s0[0].real))


def visibility(result: PatternResult) -> float:
    """Sinusoidal visibility ``2 |S_1| / S_0``."""
    return visibility_from_terms(result.orders, result.terms)


def pattern(spec: InterferometerSpec, mol: MoleculeSpec, p: CollapseParams, x_samples,
            N: int = DEFAULT_ORDER, *, prefactor: float = None, mode: str = "talbot") -> PatternResult:
    """Fringe pattern at ``x_samples``.

    ``prefactor`` defaults to the amplified centre-of-mass rate of ``mol``.
    """
    model = PatternModel(spec, mol, p, N, mode=mode)
    if prefactor is None:
        prefactor = effective_rate(mol, p).Lambda
    terms = model.terms(prefactor)
    x = np.asarray(x_samples, dtype=float)
    values = np.exp(2j * np.pi * np.outer(x, model.orders) / spec.d) @ terms
    res = PatternResult(model.orders, terms, x, _real_pattern(values), spec.d, prefactor)
    res.visibility = visibility(res)
    return res


def pattern_velocity_averaged(spec: InterferometerSpec, mol: MoleculeSpec, p: CollapseParams, x_samples,
                              velocities, weights, N: int = DEFAULT_ORDER, *,
                              mode: str = "talbot") -> PatternResult:
    """Weighted sum of single-velocity patterns; flight times follow ``L / v``."""
    from dataclasses import replace
    from .core import de_broglie_wavenumber

    w = np.asarray(weights, dtype=float)
    if w.shape != np.shape(velocities) or np.any(w < 0) or w.sum() <= 0:
        raise DomainError("weights must be non-negative, non-zero and match velocities")
    w = w / w.sum()
    results = []
    for v in velocities:
        sv = replace(spec, k=de_broglie_wavenumber(mol.mass, v), t1=spec.L1 / v, t2=spec.L2 / v)
        results.append(pattern(sv, mol, p, x_samples, N, mode=mode))
    width = max(r.orders.max() for r in results)
    orders = np.arange(-width, width + 1)
    terms = np.zeros(orders.size, dtype=complex)
    for wi, r in zip(w, results):
        terms[r.orders + width] += wi * r.terms
    S = sum(wi * r.S for wi, r in zip(w, results))
    res = PatternResult(orders, terms, np.asarray(x_samples, dtype=float), S, spec.d, results[0].prefactor)
    res.visibility = visibility(res)
    return res
