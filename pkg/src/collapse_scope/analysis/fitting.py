"""Fringe data records and the chi-square comparison with a model pattern."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import DomainError

MIN_ROWS = 8
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
PHASE_GRID = 64


@dataclass(frozen=True)
class FringeData:
    x: np.ndarray  # m
    count: np.ndarray
    sigma: np.ndarray
    source: str = ""

    def __post_init__(self):
        for name in ("x", "count", "sigma"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        problems = self.problems()
        if problems:
            raise DomainError("; ".join(problems))

    def __len__(self):
        return self.x.size

    @property
    def rows(self):
        return list(zip(self.x.tolist(), self.count.tolist(), self.sigma.tolist()))

    def problems(self):
        out = []
        if not (self.x.shape == self.count.shape == self.sigma.shape) or self.x.ndim != 1:
            return ["x, count and sigma must be 1-D and of equal length"]
        if self.x.size < MIN_ROWS:
            out.append(f"need at least {MIN_ROWS} rows, got {self.x.size}")
        for i in np.nonzero(~(self.sigma > 0) | ~np.isfinite(self.sigma))[0][:5]:
            out.append(f"row {i + 1}: sigma must be > 0, got {self.sigma[i]!r}")
        for i in np.nonzero(~(self.count >= 0) | ~np.isfinite(self.count))[0][:5]:
            out.append(f"row {i + 1}: count must be >= 0, got {self.count[i]!r}")
        if not np.all(np.isfinite(self.x)):
            out.append("x must be finite")
        return out

    def check_span(self, d: float) -> None:
        xs = np.unique(self.x)
        if xs.size < 2:
            raise DomainError("degenerate fringe data: all positions equal")
        step = np.min(np.diff(xs))
        if xs[-1] - xs[0] + step < d * (1 - 1e-9):
            raise DomainError(f"fringe data span {xs[-1] - xs[0]:.4g} m covers less than one period d={d:.4g} m")


@dataclass(frozen=True)
class FitResult:
    chi2: float
    amplitude: float
    offset: float
    phase: float  # m, pattern evaluated at x + phase


class FringeFitter:
    """Chi-square of data against ``a * S(x + phi) + b`` for series-defined patterns.

    The design matrix over data positions and orders is built once, so
    repeated fits (one per trial collapse rate) only cost small products.
    """

    def __init__(self, data: FringeData, orders, d: float, *, fit_offset: bool = True):
        data.check_span(d)
        self.data, self.d, self.fit_offset = data, d, fit_offset
        self.orders = np.asarray(orders)
        self.w = 1.0 / data.sigma**2
        self.basis = np.exp(2j * np.pi * np.outer(data.x, self.orders) / d)

    def _models(self, terms, phases):
        rot = np.exp(2j * np.pi * np.outer(self.orders, phases) / self.d)
        return (self.basis @ (terms[:, None] * rot)).real

    def _solve(self, M):
        """Best (chi2, a, b) for each column of model matrix ``M``."""
        c, w = self.data.count[:, None], self.w[:, None]
        Sw = w.sum()
        Sm = (w * M).sum(axis=0)
        Smm = (w * M * M).sum(axis=0)
        Sc = (w * c).sum()
        Scm = (w * c * M).sum(axis=0)
        if self.fit_offset:
            det = Smm * Sw - Sm * Sm
            with np.errstate(divide="ignore", invalid="ignore"):
                a = np.where(det > 0, (Scm * Sw - Sm * Sc) / det, 0.0)
                b = np.where(det > 0, (Smm * Sc - Sm * Scm) / det, Sc / Sw)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                a = np.where(Smm > 0, Scm / Smm, 0.0)
            b = np.zeros_like(a)
        resid = (c - a * M - b) * np.sqrt(w)
        return (resid**2).sum(axis=0), a, b

    def fit(self, terms) -> FitResult:
        terms = np.asarray(terms, dtype=complex)
        grid = np.arange(PHASE_GRID) * self.d / PHASE_GRID
        chi, _, _ = self._solve(self._models(terms, grid))
        j = int(np.argmin(chi))
        step = self.d / PHASE_GRID

        def f(phi):
            return float(self._solve(self._models(terms, np.array([phi])))[0][0])

        lo, hi = grid[j] - step, grid[j] + step
        x1, x2 = hi - GOLDEN * (hi - lo), lo + GOLDEN * (hi - lo)
        f1, f2 = f(x1), f(x2)
        while hi - lo > 1e-7 * self.d:
            if f1 <= f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - GOLDEN * (hi - lo)
                f1 = f(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + GOLDEN * (hi - lo)
                f2 = f(x2)
        phi = 0.5 * (lo + hi)
        chi2, a, b = self._solve(self._models(terms, np.array([phi])))
        if chi[j] < chi2[0]:
            phi = grid[j]
            chi2, a, b = self._solve(self._models(terms, grid[j:j + 1]))
        phi = float(np.mod(phi + 0.5 * self.d, self.d) - 0.5 * self.d)
        return FitResult(float(chi2[0]), float(a[0]), float(b[0]), phi)


def chi_square(data: FringeData, model_pattern, *, fit_offset: bool = True) -> FitResult:
    """Minimise chi-square over amplitude, offset and phase for a computed pattern.

    ``model_pattern`` is a :class:`~collapse_scope.talbot.PatternResult`; the
    pattern is re-evaluated from its Fourier series at ``x + phase``. With
    ``fit_offset=False`` the offset is held at zero.
    """
    fitter = FringeFitter(data, model_pattern.orders, model_pattern.d, fit_offset=fit_offset)
    return fitter.fit(model_pattern.terms)
