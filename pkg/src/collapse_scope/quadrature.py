"""Globally adaptive 7/15-point Gauss-Kronrod quadrature.

Handles real or complex integrands. For complex integrands the real and
imaginary parts must each meet ``max(abs_tol, rel_tol * |part|)``.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .core import NumericalError

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes: +-xk[1], +-xk[3], +-xk[5], 0
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]


_EPS = np.finfo(float).eps


@dataclass
class QuadResult:
    value: complex
    error: float
    intervals: int
    evaluations: int


def _rule(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    y = np.asarray(f(c + h * _NODES))
    k = h * np.dot(_KRONROD, y)
    g = h * np.dot(_GAUSS, y)
    diff = k - g
    ei = abs(diff.imag) if np.iscomplexobj(diff) else 0.0
    # round-off level of the Kronrod sum; error estimates below it are noise
    floor = 50.0 * _EPS * abs(h) * float(np.dot(_KRONROD, np.abs(y)))
    return k, abs(diff.real), ei, floor


def _accepts(total, err_re, err_im, floor, abs_tol, rel_tol):
    im = total.imag if isinstance(total, complex) or np.iscomplexobj(total) else 0.0
    return (err_re <= max(abs_tol, rel_tol * abs(total.real), floor)
            and err_im <= max(abs_tol, rel_tol * abs(im), floor))


def integrate(f, a: float, b: float, *, abs_tol: float = 1e-12, rel_tol: float = 1e-10,
              max_intervals: int = 10_000, breakpoints=None) -> QuadResult:
    """Integrate the vectorised function ``f`` over ``[a, b]``.

    ``breakpoints`` seeds the initial partition, e.g. panels no longer than
    half an oscillation period.
    """
    if b == a:
        return QuadResult(0.0, 0.0, 0, 0)
    if b < a:
        r = integrate(f, b, a, abs_tol=abs_tol, rel_tol=rel_tol, max_intervals=max_intervals,
                      breakpoints=breakpoints)
        return QuadResult(-r.value, r.error, r.intervals, r.evaluations)
    edges = sorted({a, b, *(breakpoints if breakpoints is not None else ())})
    edges = [x for x in edges if a <= x <= b]
    if len(edges) - 1 > max_intervals:
        raise NumericalError(f"{len(edges) - 1} initial panels exceed max_intervals={max_intervals}")

    heap = []
    total = 0.0
    err_re = err_im = floor = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, er, ei, fl = _rule(f, lo, hi)
        total += v
        err_re += er
        err_im += ei
        floor += fl
        heapq.heappush(heap, (-(er + ei), lo, hi, v, er, ei, fl))
    evals = 15 * len(heap)

    while not _accepts(total, err_re, err_im, floor, abs_tol, rel_tol):
        if len(heap) >= max_intervals:
            raise NumericalError(
                f"quadrature did not converge on [{a!r}, {b!r}]: error estimate "
                f"({err_re:.3e}, {err_im:.3e}) with {len(heap)} intervals, value {total!r}")
        _, lo, hi, v, er, ei, fl = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise NumericalError(f"interval [{lo!r}, {hi!r}] cannot be bisected further")
        v1, er1, ei1, fl1 = _rule(f, lo, mid)
        v2, er2, ei2, fl2 = _rule(f, mid, hi)
        evals += 30
        total += v1 + v2 - v
        err_re += er1 + er2 - er
        err_im += ei1 + ei2 - ei
        floor += fl1 + fl2 - fl
        heapq.heappush(heap, (-(er1 + ei1), lo, mid, v1, er1, ei1, fl1))
        heapq.heappush(heap, (-(er2 + ei2), mid, hi, v2, er2, ei2, fl2))

    # recompute the sum to shed accumulated update round-off
    value = sum(item[3] for item in heap)
    return QuadResult(value, err_re + err_im, len(heap), evals)
