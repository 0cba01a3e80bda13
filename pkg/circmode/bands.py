# -*- coding: utf-8 -*-
"""Critical bandwidths and cross-validation pseudo-likelihood bandwidth optimization."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from .circdist import AngleSample
from .config import DEFAULT_TUNING, Tuning
from .errors import DegenerateDensityError, InsufficientSampleError, InvalidParameterError, TieError
from .kde import KdeSpec, count_modes, loo_densities

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class CriticalBandwidthResult:  # pylint: disable=too-few-public-methods
    """Smallest bandwidth with at most k modes, and the counts that bracket it.

    ``modes_below`` is the count at ``h_k * (1 - bracketing_tol_rel)``; it is None
    when ``floor_hit`` (the estimate already has at most k modes at h_floor).
    """

    k: int
    h_k: float
    modes_at_hk: int
    modes_below: Optional[int]
    bracketing_tol_rel: float
    floor_hit: bool = False


@dataclass(frozen=True)
class PseudoLikelihoodProfile:  # pylint: disable=too-few-public-methods
    grid: Tuple[Tuple[float, float], ...]
    h_k: float
    h_max: float
    h_H0: float
    l_max: float
    l_H0: float


def _require_cv_sample(sample: AngleSample):
    if sample.n < 2:
        raise InsufficientSampleError("The cross-validation pseudo-likelihood needs at least two observations.")
    if sample.has_ties:
        raise TieError(sample.duplicates())


def log_cv_pseudo_likelihood(sample: AngleSample, h: float) -> float:
    """ℓ_CV(h) = Σ_i log f̂_h^{-i}(X_i); -inf when a leave-one-out density underflows."""
    _require_cv_sample(sample)
    if not math.isfinite(h) or h <= 0.0:
        raise InvalidParameterError(f"Bandwidth must be finite and positive, got {h}")
    loo = loo_densities(sample, h)
    if np.any(loo <= 0.0):
        return -math.inf
    return float(np.sum(np.log(loo)))


def profile_curve(sample: AngleSample, grid: Iterable[float]) -> np.ndarray:
    """ℓ_CV evaluated at every bandwidth of ``grid``."""
    _require_cv_sample(sample)
    return np.array([log_cv_pseudo_likelihood(sample, float(h)) for h in grid])


def golden_section_max(func: Callable[[float], float], a: float, b: float, tol: float) -> Tuple[float, float]:
    """Maximize a unimodal function on [a, b]; stops once the bracket is narrower than tol.

    Returns:
        tuple: (argmax, value)
    """
    c = b - (b - a) / GOLDEN_RATIO
    d = a + (b - a) / GOLDEN_RATIO
    f_c = func(c)
    f_d = func(d)
    while abs(b - a) > tol:
        if f_c > f_d:
            b, d, f_d = d, c, f_c
            c = b - (b - a) / GOLDEN_RATIO
            f_c = func(c)
        else:
            a, c, f_c = c, d, f_d
            d = a + (b - a) / GOLDEN_RATIO
            f_d = func(d)
    middle = 0.5 * (a + b)
    return middle, func(middle)


def critical_bandwidth(sample: AngleSample, k: int, tuning: Tuning = DEFAULT_TUNING) -> CriticalBandwidthResult:
    """h_k = inf{h > 0 : f̂_h has k or fewer modes}.

    The search starts from h0 = n^(-1/5), halves or doubles until the count
    crosses k, then bisects geometrically to a relative width of
    ``tuning.bracket_tol_rel``. The returned h_k is the upper end of the final
    bracket.
    """
    if int(k) < 1:
        raise InvalidParameterError(f"Target mode count must be at least 1, got {k}")
    k = int(k)
    tol = tuning.bracket_tol_rel

    def modes_at(h: float) -> int:
        return count_modes(KdeSpec(sample, h, tuning.eval_grid_size), locate=False).count

    start = min(max(sample.n ** (-0.2), tuning.h_floor), tuning.h_ceil)
    count = modes_at(start)
    if count <= k:
        hi, count_hi = start, count
        h = start
        while True:
            h = h / 2.0
            if h <= tuning.h_floor:
                count = modes_at(tuning.h_floor)
                if count <= k:
                    logger.info("Kernel estimate has at most %d modes down to h_floor=%g", k, tuning.h_floor)
                    return CriticalBandwidthResult(k, tuning.h_floor, count, None, tol, floor_hit=True)
                lo = tuning.h_floor
                break
            count = modes_at(h)
            if count > k:
                lo = h
                break
            hi, count_hi = h, count
    else:
        lo = start
        h = start
        while True:
            h = min(2.0 * h, tuning.h_ceil)
            count = modes_at(h)
            if count <= k:
                hi, count_hi = h, count
                break
            if h >= tuning.h_ceil:
                raise DegenerateDensityError(
                    f"Kernel estimate still has {count} modes at h_ceil={tuning.h_ceil}; "
                    f"the sample cannot be smoothed to {k} mode(s)."
                )
            lo = h

    while hi / lo > 1.0 + tol:
        mid = math.sqrt(lo * hi)
        count = modes_at(mid)
        if count <= k:
            hi, count_hi = mid, count
        else:
            lo = mid
    below = modes_at(hi * (1.0 - tol))
    logger.debug("Critical bandwidth h_%d=%.8g (%d modes, %d just below)", k, hi, count_hi, below)
    return CriticalBandwidthResult(k, hi, count_hi, below, tol)


def _refine(sample: AngleSample, grid: np.ndarray, values: np.ndarray, tuning: Tuning) -> Tuple[float, float]:
    """Golden-section refinement on log h around the best point of ``grid``."""
    best = int(np.argmax(values))
    h_best, l_best = float(grid[best]), float(values[best])
    if not math.isfinite(l_best):
        return h_best, l_best
    left = float(grid[max(best - 1, 0)])
    right = float(grid[min(best + 1, grid.size - 1)])
    if right <= left:
        return h_best, l_best

    def objective(log_h: float) -> float:
        return log_cv_pseudo_likelihood(sample, math.exp(log_h))

    log_h, value = golden_section_max(objective, math.log(left), math.log(right), math.log1p(tuning.golden_tol_rel))
    if value > l_best:
        return math.exp(log_h), value
    return h_best, l_best


def likelihood_profile(sample: AngleSample, h_k: float, tuning: Tuning = DEFAULT_TUNING) -> PseudoLikelihoodProfile:
    """Unconstrained and h >= h_k constrained maximizers of ℓ_CV.

    ℓ_CV is evaluated on a log-spaced grid over [h_floor, h_ceil] joined with
    h_k, and each maximum is polished by golden-section search between the
    neighbours of the best grid point.
    """
    _require_cv_sample(sample)
    grid = np.geomspace(tuning.h_floor, tuning.h_ceil, tuning.profile_grid_size)
    if tuning.h_floor <= h_k <= tuning.h_ceil:
        grid = np.union1d(grid, [h_k])
    values = profile_curve(sample, grid)
    h_max, l_max = _refine(sample, grid, values, tuning)

    allowed = grid >= h_k
    if not np.any(allowed):
        raise InvalidParameterError(f"h_k={h_k} lies above h_ceil={tuning.h_ceil}")
    if h_max >= h_k:
        h_h0, l_h0 = h_max, l_max
    else:
        h_h0, l_h0 = _refine(sample, grid[allowed], values[allowed], tuning)
        if l_h0 > l_max:
            h_max, l_max = h_h0, l_h0
    pairs = tuple((float(h), float(value)) for h, value in zip(grid, values))
    return PseudoLikelihoodProfile(pairs, float(h_k), float(h_max), float(h_h0), float(l_max), float(l_h0))
