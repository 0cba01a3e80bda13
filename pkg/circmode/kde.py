# -*- coding: utf-8 -*-
"""Circular kernel density estimation with the wrapped normal kernel WN(0, h²).

Two evaluation branches are used. For h below ``FOURIER_MIN_SIGMA`` the kernel
sum is evaluated directly against the data repeated on (-2π, 4π], restricted to
a window around each block of evaluation points. Above it the estimator is
evaluated from the trigonometric moments of the sample.

Mode finding works on derivatives rescaled by a positive per-point factor (the
nearest kernel term, or the leading Fourier harmonic), so derivative signs stay
meaningful where the density itself underflows or is flat to machine precision.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .circdist import (
    FOURIER_MIN_SIGMA,
    TWO_PI,
    AngleSample,
    RngStream,
    fourier_terms,
    normalize_angle,
    wn_density,
    wn_segment_mass,
)
from .errors import DegenerateDensityError, InsufficientSampleError, InvalidParameterError

logger = logging.getLogger(__name__)

# Terms further than WINDOW bandwidths beyond the nearest datum are below
# exp(-800) relative to it and vanish in double precision.
WINDOW = 40.0
_BLOCK = 512
_MOMENT_TOL = 1e-12
_PLATEAU_TOL = 1e-13
_MAX_SCAN_HARMONIC = 64


@dataclass(frozen=True)
class KdeSpec:
    """A sample together with the bandwidth the estimator is evaluated at."""

    sample: AngleSample
    h: float
    eval_grid_size: int = 2048

    def __post_init__(self):
        if not math.isfinite(self.h) or self.h <= 0.0:
            raise InvalidParameterError(f"Bandwidth must be finite and positive, got {self.h}")
        if self.eval_grid_size < 8:
            raise InvalidParameterError(f"Evaluation grid needs at least 8 points, got {self.eval_grid_size}")

    @property
    def n(self) -> int:
        return self.sample.n

    @property
    def uses_fourier(self) -> bool:
        return self.h >= FOURIER_MIN_SIGMA

    @cached_property
    def extended_data(self) -> np.ndarray:
        data = self.sample.sorted
        return np.concatenate([data - TWO_PI, data, data + TWO_PI])

    @cached_property
    def moments(self) -> Tuple[np.ndarray, np.ndarray]:
        """Trigonometric moments (mean cos pX, mean sin pX) for p = 1..P."""
        count = max(fourier_terms(self.h), _MAX_SCAN_HARMONIC)
        harmonics = np.arange(1, count + 1, dtype=float)
        phases = np.multiply.outer(harmonics, self.sample.angles)
        return np.cos(phases).mean(axis=1), np.sin(phases).mean(axis=1)

    def with_bandwidth(self, h: float) -> "KdeSpec":
        return KdeSpec(self.sample, h, self.eval_grid_size)


@dataclass(frozen=True)
class ModeCount:
    count: int
    mode_locations: Tuple[float, ...]
    antimode_locations: Tuple[float, ...]


def _direct_sums(spec: KdeSpec, points: np.ndarray):
    """Kernel sums against the windowed data, scaled by the nearest term.

    Returns (emin, s0, t1, t2): with c = exp(-emin) / (n sqrt(2π) h),
    f = c s0, f' = c t1 / h², f'' = c t2 / h².
    """
    h = spec.h
    ext = spec.extended_data
    order = np.argsort(points, kind="stable")
    xs = points[order]
    emin = np.empty(xs.size)
    s0 = np.empty(xs.size)
    t1 = np.empty(xs.size)
    t2 = np.empty(xs.size)
    inv_two_h2 = 1.0 / (2.0 * h * h)
    for start in range(0, xs.size, _BLOCK):
        block = xs[start : start + _BLOCK]
        pos = np.searchsorted(ext, block)
        left = ext[np.maximum(pos - 1, 0)]
        right = ext[np.minimum(pos, ext.size - 1)]
        nearest = np.minimum(np.abs(block - left), np.abs(right - block))
        reach = float(nearest.max()) + WINDOW * h
        lo = np.searchsorted(ext, block[0] - reach, side="left")
        hi = np.searchsorted(ext, block[-1] + reach, side="right")
        diff = block[:, None] - ext[None, lo:hi]
        expo = diff * diff * inv_two_h2
        low = expo.min(axis=1)
        weight = np.exp(low[:, None] - expo)
        sl = slice(start, start + block.size)
        emin[sl] = low
        s0[sl] = weight.sum(axis=1)
        t1[sl] = -(diff * weight).sum(axis=1)
        t2[sl] = ((diff * diff / (h * h) - 1.0) * weight).sum(axis=1)
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)
    return emin[inverse], s0[inverse], t1[inverse], t2[inverse]


def _fourier_parts(spec: KdeSpec, points: np.ndarray, first: int, last: int, anchor: int):
    """Harmonic sums for p in [first, last], each weighted by ρ_p / ρ_anchor."""
    cos_m, sin_m = spec.moments
    h2 = spec.h * spec.h
    value = np.zeros(points.size)
    slope = np.zeros(points.size)
    curve = np.zeros(points.size)
    for p in range(first, last + 1):
        weight = math.exp(-0.5 * (p * p - anchor * anchor) * h2) if anchor else math.exp(-0.5 * p * p * h2)
        if weight == 0.0:
            break
        c, s = cos_m[p - 1], sin_m[p - 1]
        cos_px = np.cos(p * points)
        sin_px = np.sin(p * points)
        in_phase = c * cos_px + s * sin_px
        value += weight * in_phase
        slope += weight * p * (s * cos_px - c * sin_px)
        curve -= weight * p * p * in_phase
    return value, slope, curve


def _leading_harmonic(spec: KdeSpec) -> int:
    cos_m, sin_m = spec.moments
    strong = np.flatnonzero(np.hypot(cos_m, sin_m) > _MOMENT_TOL)
    if strong.size == 0:
        raise DegenerateDensityError(
            f"Kernel density estimate at h={spec.h:.6g} is numerically uniform: "
            f"no trigonometric moment up to order {cos_m.size} exceeds {_MOMENT_TOL}."
        )
    return int(strong[0]) + 1


def _evaluate(spec: KdeSpec, points) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Density, first and second derivative at the given angles."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if spec.uses_fourier:
        value, slope, curve = _fourier_parts(spec, points, 1, fourier_terms(spec.h), 0)
        return (1.0 + 2.0 * value) / TWO_PI, slope / math.pi, curve / math.pi
    emin, s0, t1, t2 = _direct_sums(spec, points)
    scale = np.exp(-emin) / (spec.n * math.sqrt(TWO_PI) * spec.h)
    h2 = spec.h * spec.h
    return scale * s0, scale * t1 / h2, scale * t2 / h2


def _scaled_derivatives(spec: KdeSpec, points) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(f, f', f'') up to one positive factor per point; also returns the plateau mask."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if spec.uses_fourier:
        anchor = _leading_harmonic(spec)
        _, slope, curve = _fourier_parts(spec, points, anchor, _MAX_SCAN_HARMONIC, anchor)
        flat = (np.abs(slope) <= _PLATEAU_TOL) & (np.abs(curve) <= _PLATEAU_TOL)
        return slope, curve, flat
    _, s0, t1, t2 = _direct_sums(spec, points)
    flat = (np.abs(t1) <= _PLATEAU_TOL * spec.h * s0) & (np.abs(t2) <= _PLATEAU_TOL * s0)
    return t1, t2, flat


def kde_density(spec: KdeSpec, x):
    """f̂_h(x) = (1/n) Σ K_h(x - X_i)."""
    values = np.maximum(_evaluate(spec, normalize_angle(x))[0], 0.0)
    return float(values[0]) if np.ndim(x) == 0 else values


def kde_derivative(spec: KdeSpec, x, order: int = 1):
    """Exact first (order=1) or second (order=2) derivative of f̂_h."""
    if order not in (1, 2):
        raise InvalidParameterError(f"Derivative order must be 1 or 2, got {order}")
    values = _evaluate(spec, normalize_angle(x))[order]
    return float(values[0]) if np.ndim(x) == 0 else values


def kde_cdf(spec: KdeSpec, x):
    """F̂_h(x) = ∫_0^x f̂_h(y) dy for x in (0, 2π]."""
    points = np.atleast_1d(normalize_angle(x))
    if spec.uses_fourier:
        cos_m, sin_m = spec.moments
        h2 = spec.h * spec.h
        total = points / TWO_PI
        for p in range(1, fourier_terms(spec.h) + 1):
            weight = math.exp(-0.5 * p * p * h2) / (math.pi * p)
            total = total + weight * (np.sin(p * points) * cos_m[p - 1] - np.cos(p * points) * sin_m[p - 1] + sin_m[p - 1])
    else:
        data = spec.sample.angles
        total = np.empty(points.size)
        step = max(1, 2_000_000 // max(1, data.size))
        for start in range(0, points.size, step):
            chunk = points[start : start + step]
            total[start : start + step] = wn_segment_mass(0.0, chunk[:, None], data[None, :], spec.h**2).mean(axis=1)
    total = np.clip(total, 0.0, 1.0)
    return float(total[0]) if np.ndim(x) == 0 else total


def kde_loo_density(spec: KdeSpec, i: int) -> float:
    """Leave-one-out density f̂_h^{-i}(X_i)."""
    n = spec.n
    if n < 2:
        raise InsufficientSampleError("Leave-one-out densities need at least two observations.")
    angles = spec.sample.angles
    others = np.delete(angles, i)
    return float(np.sum(wn_density(angles[i] - others, 0.0, spec.h**2)) / (n - 1))


@lru_cache(maxsize=2)
def _pair_table(sample: AngleSample):
    """All index pairs i < j with their circular distance, sorted by distance."""
    first, second = np.triu_indices(sample.n, k=1)
    gap = np.abs(sample.angles[first] - sample.angles[second])
    gap = np.minimum(gap, TWO_PI - gap)
    order = np.argsort(gap, kind="stable")
    return first[order], second[order], gap[order]


def loo_densities(sample: AngleSample, h: float) -> np.ndarray:
    """All n leave-one-out densities f̂_h^{-i}(X_i), i = 1..n."""
    n = sample.n
    if n < 2:
        raise InsufficientSampleError("Leave-one-out densities need at least two observations.")
    spec = KdeSpec(sample, h)
    if spec.uses_fourier:
        full, _, _ = _evaluate(spec, sample.angles)
        loo = (n * full - wn_density(0.0, 0.0, h * h)) / (n - 1)
        return np.maximum(loo, 0.0)
    first, second, gap = _pair_table(sample)
    if WINDOW * h < math.pi:
        cut = np.searchsorted(gap, WINDOW * h, side="right")
        first, second, gap = first[:cut], second[:cut], gap[:cut]
    kernel = np.atleast_1d(wn_density(gap, 0.0, h * h))
    sums = np.bincount(first, weights=kernel, minlength=n) + np.bincount(second, weights=kernel, minlength=n)
    return sums / (n - 1)


def _scan_grid(spec: KdeSpec) -> np.ndarray:
    size = max(spec.eval_grid_size, int(math.ceil(10.0 * TWO_PI / spec.h)))
    return TWO_PI * np.arange(1, size + 1) / size


def _scalar_root(func, lo: float, hi: float) -> float:
    f_lo = func(lo)
    if f_lo == 0.0:
        return lo
    f_hi = func(hi)
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        return 0.5 * (lo + hi)
    return float(brentq(func, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200))


def count_modes(spec: KdeSpec, locate: bool = True) -> ModeCount:
    """Count the strict local maxima of f̂_h on the circle.

    Critical points are bracketed by sign changes of the derivative on a grid
    with spacing at most min(h/10, 2π/eval_grid_size). Cells where a maximum and
    a minimum could both hide (second derivative changing sign while the first
    derivative is small) are checked separately. With ``locate`` the roots are
    refined with Brent's method; otherwise bracket midpoints are reported.
    """
    grid = _scan_grid(spec)
    step = TWO_PI / grid.size
    slope, curve, flat = _scaled_derivatives(spec, grid)
    if np.all(flat):
        raise DegenerateDensityError(f"Kernel density estimate at h={spec.h:.6g} is flat on the whole circle.")
    run = flat & np.roll(flat, 1) & np.roll(flat, -1)
    if np.any(run):
        where = grid[np.flatnonzero(run)[0]]
        raise DegenerateDensityError(f"Kernel density estimate at h={spec.h:.6g} has a plateau near x={where:.6g}.")

    def first_derivative(t):
        return float(_scaled_derivatives(spec, normalize_angle(t))[0][0])

    def second_derivative(t):
        return float(_scaled_derivatives(spec, normalize_angle(t))[1][0])

    brackets: List[Tuple[float, float, bool]] = []  # (lo, hi, is_mode)

    signs = np.sign(slope)
    nonzero = np.flatnonzero(signs)
    following = np.roll(nonzero, -1)
    for here, there in zip(nonzero, following):
        if signs[here] == signs[there]:
            continue
        lo = grid[here]
        hi = grid[there] if there > here else grid[there] + TWO_PI
        brackets.append((lo, hi, bool(signs[here] > 0)))

    nxt = np.roll(np.arange(grid.size), -1)
    same_sign = (signs != 0) & (signs == signs[nxt])
    curve_flip = (curve >= 0.0) != (curve[nxt] >= 0.0)
    small = (np.abs(slope) <= 2.0 * step * np.abs(curve)) | (np.abs(slope[nxt]) <= 2.0 * step * np.abs(curve[nxt]))
    for cell in np.flatnonzero(same_sign & curve_flip & small):
        lo = grid[cell]
        hi = lo + step
        turn = _scalar_root(second_derivative, lo, hi)
        if np.sign(first_derivative(turn)) * signs[cell] < 0:
            rising = bool(signs[cell] > 0)
            brackets.append((lo, turn, rising))
            brackets.append((turn, hi, not rising))
            logger.debug("Close mode/antimode pair inside grid cell at %.8f (h=%.6g)", lo, spec.h)

    if not any(is_mode for _, _, is_mode in brackets):
        raise DegenerateDensityError(f"No derivative sign change found for h={spec.h:.6g}.")

    modes, antimodes = [], []
    for lo, hi, is_mode in brackets:
        where = _scalar_root(first_derivative, lo, hi) if locate else 0.5 * (lo + hi)
        (modes if is_mode else antimodes).append(normalize_angle(where))
    return ModeCount(len(modes), tuple(sorted(modes)), tuple(sorted(antimodes)))


def kde_resample(spec: KdeSpec, n_out: int, rng: RngStream) -> AngleSample:
    """Exact draws from f̂_h: a uniformly chosen datum plus WN(0, h²) noise."""
    if int(n_out) < 1:
        raise InvalidParameterError(f"Resample size must be at least 1, got {n_out}")
    generator = rng.generator
    picks = generator.integers(0, spec.n, size=int(n_out))
    noise = spec.h * generator.standard_normal(int(n_out))
    return AngleSample(spec.sample.sorted[picks] + noise)


def kde_curve(spec: KdeSpec, grid_size: int = 512) -> Tuple[np.ndarray, np.ndarray]:
    """(x, f̂_h(x)) on the regular grid x_j = 2πj/grid_size, j = 1..grid_size."""
    grid = TWO_PI * np.arange(1, grid_size + 1) / grid_size
    return grid, np.maximum(_evaluate(spec, grid)[0], 0.0)
