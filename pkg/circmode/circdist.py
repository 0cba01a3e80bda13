# -*- coding: utf-8 -*-
"""Circular probability models: angles, samples, densities, CDFs and exact sampling.

Angles live on (0, 2π]. The wrapped normal WN(μ, σ²) uses the parameterization
with density (2πσ²)^{-1/2} Σ_m exp(-(x - μ + 2πm)² / (2σ²)).
"""

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid
from scipy.special import i0e, ndtr

from .errors import InvalidParameterError, InvalidRangeError

TWO_PI = 2.0 * math.pi

# Above this standard deviation the Fourier (dual) form of the wrapped normal
# needs fewer terms than the sum over wraps.
FOURIER_MIN_SIGMA = 0.5
_FOURIER_LOG_TOL = math.log(1e17)


def normalize_angle(values):
    """Map any real angle(s) onto (0, 2π]; 0 maps to 2π."""
    wrapped = TWO_PI - np.mod(-np.asarray(values, dtype=float), TWO_PI)
    wrapped = np.where(wrapped <= 0.0, TWO_PI, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def reduce_difference(values):
    """Map angle differences onto (-π, π]."""
    return math.pi - np.mod(math.pi - np.asarray(values, dtype=float), TWO_PI)


def stable_key(text: str) -> int:
    """Platform-independent 64-bit integer for a text key (model ids in stream paths)."""
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "little")


@dataclass(frozen=True, eq=False)
class AngleSample:
    """An ordered collection of angles normalized to (0, 2π]."""

    angles: np.ndarray

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.angles, dtype=float)).ravel()
        if values.size == 0:
            raise InvalidParameterError("An angle sample needs at least one observation.")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("Angles must be finite.")
        values = normalize_angle(values)
        values = np.atleast_1d(values)
        values.setflags(write=False)
        object.__setattr__(self, "angles", values)

    @classmethod
    def from_values(cls, values: Union[Sequence[float], np.ndarray]) -> "AngleSample":
        return cls(np.asarray(values, dtype=float))

    @property
    def n(self) -> int:
        return int(self.angles.size)

    def __len__(self) -> int:
        return self.n

    @cached_property
    def sorted(self) -> np.ndarray:
        ordered = np.sort(self.angles, kind="stable")
        ordered.setflags(write=False)
        return ordered

    def duplicates(self) -> np.ndarray:
        """Distinct values that occur more than once."""
        ordered = self.sorted
        repeated = ordered[1:][np.diff(ordered) == 0.0]
        return np.unique(repeated)

    @property
    def has_ties(self) -> bool:
        return bool(self.duplicates().size)

    def rotated(self, delta: float) -> "AngleSample":
        return AngleSample(self.angles + delta)

    def reflected(self) -> "AngleSample":
        return AngleSample(TWO_PI - self.angles)


class RngStream:
    """Reproducible random stream identified by (master_seed, stream_id[, path]).

    Streams are built from numpy ``SeedSequence`` spawn keys, so equal ids give
    identical sequences and different ids give independent ones regardless of
    the order in which streams are created.
    """

    def __init__(self, master_seed: int, stream_id: int = 0, path: Tuple[int, ...] = ()):
        self.master_seed = int(master_seed) % 2**64
        self.stream_id = int(stream_id) % 2**64
        self.path = tuple(int(key) % 2**64 for key in path)
        seed_seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,) + self.path)
        self.generator = np.random.Generator(np.random.PCG64(seed_seq))

    def derive(self, *keys: int) -> "RngStream":
        """Child stream, independent of this one and of its siblings."""
        return RngStream(self.master_seed, self.stream_id, self.path + tuple(keys))

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id}, path={self.path})"


def _check_sigma2(sigma2) -> float:
    sigma2 = float(sigma2)
    if not math.isfinite(sigma2) or sigma2 <= 0.0:
        raise InvalidParameterError(f"Wrapped normal variance must be finite and positive, got {sigma2}")
    return sigma2


def fourier_terms(sigma: float) -> int:
    """Number of harmonics p with exp(-p²σ²/2) above 1e-17."""
    return max(1, int(math.ceil(math.sqrt(2.0 * _FOURIER_LOG_TOL) / sigma)))


def direct_wraps(sigma: float) -> int:
    """Wraps per side for a difference already reduced to (-π, π]."""
    return max(1, int(math.floor((max(6.0 * sigma, TWO_PI) + math.pi) / TWO_PI)))


def wn_density(x, mu, sigma2):
    """Wrapped normal WN(μ, σ²) density at x (scalar or array)."""
    sigma2 = _check_sigma2(sigma2)
    sigma = math.sqrt(sigma2)
    diff = reduce_difference(np.asarray(x, dtype=float) - np.asarray(mu, dtype=float))
    if sigma >= FOURIER_MIN_SIGMA:
        harmonics = np.arange(1, fourier_terms(sigma) + 1, dtype=float)
        rho = np.exp(-0.5 * harmonics**2 * sigma2)
        series = np.cos(np.multiply.outer(diff, harmonics)) @ rho
        value = (1.0 + 2.0 * series) / TWO_PI
    else:
        wraps = direct_wraps(sigma)
        value = np.zeros_like(diff)
        for m in range(-wraps, wraps + 1):
            value = value + np.exp(-((diff + TWO_PI * m) ** 2) / (2.0 * sigma2))
        value = value / math.sqrt(TWO_PI * sigma2)
    value = np.maximum(value, 0.0)
    if np.ndim(value) == 0:
        return float(value)
    return value


def _normal_mass(upper, lower):
    """Φ(upper) - Φ(lower), evaluated on the side of the tail that keeps precision."""
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    right_tail = lower > 0.0
    return np.where(right_tail, ndtr(-lower) - ndtr(-upper), ndtr(upper) - ndtr(lower))


def wn_segment_mass(a, b, mu, sigma2):
    """Broadcasting ∫_a^b WN(μ, σ²) without argument checks (internal workhorse)."""
    sigma = math.sqrt(sigma2)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if sigma >= FOURIER_MIN_SIGMA:
        total = (b - a) / TWO_PI + np.zeros(np.broadcast(a, b, mu).shape)
        for p in range(1, fourier_terms(sigma) + 1):
            weight = math.exp(-0.5 * p * p * sigma2) / (math.pi * p)
            total = total + weight * (np.sin(p * (b - mu)) - np.sin(p * (a - mu)))
        return total
    wraps = direct_wraps(sigma) + 2
    total = np.zeros(np.broadcast(a, b, mu).shape)
    for m in range(-wraps, wraps + 1):
        total = total + _normal_mass((b - mu + TWO_PI * m) / sigma, (a - mu + TWO_PI * m) / sigma)
    return total


def wn_cdf_segment(a: float, b: float, mu: float, sigma2: float) -> float:
    """Probability that WN(μ, σ²) falls in the arc [a, b] with 0 <= a <= b <= 2π."""
    sigma2 = _check_sigma2(sigma2)
    a = float(a)
    b = float(b)
    if a > b:
        raise InvalidRangeError(f"Segment start {a} exceeds its end {b}")
    if a < 0.0 or b > TWO_PI + 1e-12:
        raise InvalidRangeError(f"Segment [{a}, {b}] is not inside [0, 2π]")
    mass = float(wn_segment_mass(a, b, normalize_angle(mu), sigma2))
    return min(1.0, max(0.0, mass))


def log_i0(kappa: float) -> float:
    """log I₀(κ), computed from the exponentially scaled Bessel function."""
    return float(math.log(i0e(kappa)) + kappa)


@dataclass(frozen=True)
class VonMises:
    mu: float
    kappa: float

    def __post_init__(self):
        if not math.isfinite(self.kappa) or self.kappa < 0.0:
            raise InvalidParameterError(f"von Mises concentration must be >= 0, got {self.kappa}")
        object.__setattr__(self, "mu", normalize_angle(self.mu))

    def density(self, x):
        # exp(κ cos(x-μ)) / (2π I₀(κ)) with the e^κ factor cancelled
        x = np.asarray(x, dtype=float)
        return np.exp(self.kappa * (np.cos(x - self.mu) - 1.0)) / (TWO_PI * i0e(self.kappa))

    def draw(self, n: int, generator: np.random.Generator) -> np.ndarray:
        return generator.vonmises(self.mu, self.kappa, size=n)


@dataclass(frozen=True)
class SineSkewedVonMises:
    mu: float
    kappa: float
    skew: float

    def __post_init__(self):
        if not -1.0 <= self.skew <= 1.0:
            raise InvalidParameterError(f"Sine-skew parameter must lie in [-1, 1], got {self.skew}")
        if not math.isfinite(self.kappa) or self.kappa < 0.0:
            raise InvalidParameterError(f"von Mises concentration must be >= 0, got {self.kappa}")
        object.__setattr__(self, "mu", normalize_angle(self.mu))

    @property
    def base(self) -> VonMises:
        return VonMises(self.mu, self.kappa)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.base.density(x) * (1.0 + self.skew * np.sin(x - self.mu))

    def draw(self, n: int, generator: np.random.Generator) -> np.ndarray:
        theta = self.base.draw(n, generator)
        keep = generator.random(n) < 0.5 * (1.0 + self.skew * np.sin(theta - self.mu))
        return np.where(keep, theta, 2.0 * self.mu - theta)


@dataclass(frozen=True)
class WrappedNormal:
    mu: float
    sigma2: float

    def __post_init__(self):
        _check_sigma2(self.sigma2)
        object.__setattr__(self, "mu", normalize_angle(self.mu))

    def density(self, x):
        return np.asarray(wn_density(x, self.mu, self.sigma2))

    def draw(self, n: int, generator: np.random.Generator) -> np.ndarray:
        return self.mu + math.sqrt(self.sigma2) * generator.standard_normal(n)


@dataclass(frozen=True)
class ScaledBeta:
    a: float
    b: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise InvalidParameterError(f"Beta shapes must be positive, got a={self.a}, b={self.b}")
        if not self.lo < self.hi <= self.lo + TWO_PI:
            raise InvalidParameterError(f"Need lo < hi <= lo + 2π, got lo={self.lo}, hi={self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def density(self, x):
        offset = np.mod(np.asarray(x, dtype=float) - self.lo, TWO_PI)
        scaled = offset / self.width
        inside = scaled <= 1.0
        values = stats.beta.pdf(np.where(inside, scaled, 0.5), self.a, self.b) / self.width
        return np.where(inside, values, 0.0)

    def draw(self, n: int, generator: np.random.Generator) -> np.ndarray:
        return self.lo + self.width * generator.beta(self.a, self.b, size=n)


@dataclass(frozen=True)
class Mixture:
    weights: Tuple[float, ...]
    components: Tuple["CircularModel", ...] = field(default_factory=tuple)

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        components = tuple(self.components)
        if len(weights) != len(components) or not components:
            raise InvalidParameterError("A mixture needs one weight per component and at least one component.")
        if min(weights) < 0.0 or abs(sum(weights) - 1.0) > 1e-12:
            raise InvalidParameterError(f"Mixture weights must be nonnegative and sum to 1, got {weights}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for weight, component in zip(self.weights, self.components):
            total = total + weight * component.density(x)
        return total

    def draw(self, n: int, generator: np.random.Generator) -> np.ndarray:
        picks = generator.choice(len(self.components), size=n, p=np.asarray(self.weights))
        out = np.empty(n)
        for index, component in enumerate(self.components):
            slots = np.flatnonzero(picks == index)
            if slots.size:
                out[slots] = component.draw(slots.size, generator)
        return out


CircularModel = Union[VonMises, SineSkewedVonMises, WrappedNormal, ScaledBeta, Mixture]


def model_density(model: CircularModel, x):
    """Pointwise density of a circular model (scalar in, float out)."""
    values = model.density(normalize_angle(x))
    if np.ndim(values) == 0:
        return float(values)
    return values


def model_sample(model: CircularModel, n: int, rng: RngStream) -> AngleSample:
    """Draw n i.i.d. angles from the model using the given stream."""
    if int(n) < 1:
        raise InvalidParameterError(f"Sample size must be at least 1, got {n}")
    return AngleSample(model.draw(int(n), rng.generator))


def model_cdf(model: CircularModel, x, grid_size: int = 100_000):
    """CDF ∫_0^x f by cumulative trapezoid quadrature on a regular grid."""
    grid = np.linspace(0.0, TWO_PI, grid_size + 1)
    values = model.density(np.where(grid == 0.0, TWO_PI, grid))
    cumulative = cumulative_trapezoid(values, grid, initial=0.0)
    result = np.interp(np.asarray(x, dtype=float), grid, cumulative)
    if np.ndim(result) == 0:
        return float(result)
    return result


def circular_mean(angles) -> Tuple[Optional[float], float]:
    """Mean direction (or None when undefined) and mean resultant length."""
    angles = np.asarray(angles, dtype=float)
    sin_sum = float(np.sin(angles).sum())
    cos_sum = float(np.cos(angles).sum())
    resultant = math.hypot(sin_sum, cos_sum) / angles.size
    if resultant < 1e-12:
        return None, resultant
    return normalize_angle(math.atan2(sin_sum, cos_sum)), resultant
