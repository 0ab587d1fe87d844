"""Upper bounds on the collapse rate from fringe data, scanned over r_C."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..amplification import regime, unit_rate
from ..core import CollapseParams, DomainError, InterferometerSpec, MoleculeSpec, NumericalError
from ..talbot import DEFAULT_ORDER, PatternModel
from .bounds import CLASSICALITY_RADIUS, CLASSICALITY_TIME, classicality_bound, graphene_disk
from .fitting import FringeData, FringeFitter

log = logging.getLogger(__name__)

DEFAULT_CRITERION = 9.0
LOG10_BRACKET = (-20.0, 2.0)
LOG10_TOL = 0.01
THREADS_ENV = "COLLAPSE_SCOPE_THREADS"


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass
class ExclusionCurve:
    r_C_grid: np.ndarray
    lambda_min: np.ndarray  # inf where the data exclude nothing inside the bracket
    lambda_low: np.ndarray
    model: CollapseParams
    regimes: list = field(default_factory=list)

    @property
    def fully_excluded(self) -> np.ndarray:
        """Grid points where the upper bound falls below the classicality bound."""
        return np.isfinite(self.lambda_min) & (self.lambda_min <= self.lambda_low)


@dataclass(frozen=True)
class RateProfile:
    """chi-square as a function of lambda at one r_C."""

    fitter: FringeFitter
    model: PatternModel
    rate_per_lambda: float

    def chi2(self, lam: float) -> float:
        return self.fitter.fit(self.model.terms(lam * self.rate_per_lambda)).chi2


def rate_profile(spec, mol, params, data, *, N=DEFAULT_ORDER, fit_offset=False) -> RateProfile:
    model = PatternModel(spec, mol, params, N)
    fitter = FringeFitter(data, model.orders, spec.d, fit_offset=fit_offset)
    return RateProfile(fitter, model, float(unit_rate(mol, params.r_C)))


def _slack(c: float) -> float:
    # round-off of the phase search; negligible against any sensible criterion
    return 1e-7 * abs(c) + 1e-6


def lambda_min_for(profile: RateProfile, criterion: float = DEFAULT_CRITERION,
                   bracket=LOG10_BRACKET, tol: float = LOG10_TOL) -> float:
    """Smallest lambda with ``chi2(lambda) - chi2(0) > criterion``, by bisection in log10.

    Returns ``inf`` when even the top of the bracket is not excluded and
    ``nan`` when the bottom of the bracket is already excluded. Each new
    midpoint must not exceed chi2 at the bracket top; a shallow dip below
    chi2(0) is allowed, since noisy data may prefer slightly reduced contrast.
    """
    ref = profile.chi2(0.0)
    lo, hi = bracket
    c_lo, c_hi = profile.chi2(10.0**lo), profile.chi2(10.0**hi)
    if c_hi - ref <= criterion:
        return math.inf
    if c_lo - ref > criterion:
        return math.nan
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        c_mid = profile.chi2(10.0**mid)
        if c_mid > c_hi + _slack(c_hi):
            raise NumericalError(
                f"chi2 not monotone in lambda on [1e{lo:.3f}, 1e{hi:.3f}]: "
                f"{c_lo:.6g}, {c_mid:.6g}, {c_hi:.6g}")
        if c_mid - ref > criterion:
            hi, c_hi = mid, c_mid
        else:
            lo, c_lo = mid, c_mid
    return 10.0**hi


def exclusion_scan(spec: InterferometerSpec, mol: MoleculeSpec, template: CollapseParams, data: FringeData,
                   r_C_grid, criterion: float = DEFAULT_CRITERION, *, N: int = DEFAULT_ORDER,
                   fit_offset: bool = False, threads: int = None,
                   classicality_object: MoleculeSpec = None,
                   classicality_time: float = CLASSICALITY_TIME) -> ExclusionCurve:
    """Exclusion curve ``lambda_min(r_C)`` plus the classicality lower bound.

    The fit holds the background at zero by default: with a free offset and
    amplitude a loss of fringe contrast is indistinguishable from a change of
    scale and background. Grid points run in a thread pool; results keep grid
    order.
    """
    grid = np.asarray(r_C_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("r_C grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("r_C grid must be sorted ascending without repeats")
    data.check_span(spec.d)

    def one(r):
        prof = rate_profile(spec, mol, template.with_r_C(float(r)), data, N=N, fit_offset=fit_offset)
        return lambda_min_for(prof, criterion)

    workers = threads or thread_cap()
    if workers == 1:
        lam_min = [one(r) for r in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            lam_min = list(pool.map(one, grid))

    obj = classicality_object or graphene_disk(CLASSICALITY_RADIUS)
    low = classicality_bound(obj, classicality_time, grid)
    curve = ExclusionCurve(grid, np.array(lam_min), np.asarray(low), template,
                           [regime(mol, float(r)).value for r in grid])
    if np.any(curve.fully_excluded):
        log.warning("model fully excluded at %d grid points", int(curve.fully_excluded.sum()))
    return curve
