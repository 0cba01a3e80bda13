# -*- coding: utf-8 -*-
"""Baseline multimodality statistics: empirical excess mass, Δ_{n,k+1}, Watson-type U² and curvature ratios.

The excess-mass test here resamples from f̂_{h_k} directly. It does not apply
the density modification of the published excess-mass test, so it is reported
as the "unmodified calibration" variant.
"""

import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Tuple

import numpy as np

from .bands import critical_bandwidth
from .circdist import TWO_PI, AngleSample
from .config import DEFAULT_TUNING, Tuning
from .errors import DivisionHazardError, InsufficientSampleError, InvalidParameterError, TieError
from .kde import KdeSpec, count_modes, kde_cdf, kde_density, kde_derivative
from .lrtest import TestReport, bootstrap_p_value, bootstrap_replicates

logger = logging.getLogger(__name__)

Arc = Tuple[float, float]


@dataclass(frozen=True)
class ExcessMassValue:  # pylint: disable=too-few-public-methods
    """E_{n,k}(λ) and one family of arcs attaining it.

    Arcs are (start, end) pairs of data angles read counterclockwise; an arc with
    start > end passes through 2π.
    """

    k: int
    lam: float
    value: float
    intervals: Tuple[Arc, ...]


@dataclass(frozen=True)
class DeltaStatistic:  # pylint: disable=too-few-public-methods
    k: int
    delta: float
    lambda_star: float


def _check_order(k: int):
    if int(k) < 1:
        raise InvalidParameterError(f"Number of intervals must be at least 1, got {k}")


def _require_distinct(sample: AngleSample):
    # repeated values would let two one-point arcs share a location
    if sample.has_ties:
        raise TieError(sample.duplicates())


def _excess_mass_table(points: np.ndarray, lambdas: np.ndarray, kmax: int) -> np.ndarray:
    """E_{n,c}(λ) for c = 0..kmax (rows) and every λ (columns), points sorted.

    Linear pass: at most c data-endpoint intervals, each [i, j] worth
    (j - i + 1)/n - λ (y_j - y_i) = A_j - B_i. Wrap pass: the first piece starts
    at y_1, the last ends at y_n, and the two join into one arc through 2π
    whose extra length is y_1 + 2π - y_n.
    """
    n = points.size
    ranks = np.arange(1, n + 1) / n
    gain_end = ranks[:, None] - np.outer(points, lambdas)  # A_j
    cost_start = (ranks - 1.0 / n)[:, None] - np.outer(points, lambdas)  # B_i
    pieces = kmax + 1
    width = lambdas.size

    def sweep(wrap: bool):
        closed = np.full((pieces + 1, width), -np.inf)
        closed[0] = 0.0
        opened = np.full((pieces + 1, width), -np.inf)
        for t in range(n):
            opened[1:] = np.maximum(opened[1:], closed[:-1] - cost_start[t])
            closed[1:] = np.maximum(closed[1:], opened[1:] + gain_end[t])
            if wrap and t == 0:
                closed[0] = -np.inf
                opened[2:] = -np.inf
                closed[2:] = -np.inf
        return closed, opened

    closed, _ = sweep(wrap=False)
    table = np.maximum.accumulate(closed[: kmax + 1], axis=0)
    if n >= 2:
        _, opened = sweep(wrap=True)
        seam = lambdas * (points[0] + TWO_PI - points[-1])
        wrapped = np.full((kmax + 1, width), -np.inf)
        # c arcs in the wrap pass use c + 1 linear pieces
        wrapped[1:] = opened[2 : kmax + 2] + gain_end[-1] - seam
        table = np.maximum(table, np.maximum.accumulate(wrapped, axis=0))
    table[0] = 0.0
    return table


def _best_family(points: np.ndarray, lam: float, k: int) -> Tuple[float, Tuple[Arc, ...]]:
    """Scalar version of the table that also tracks which intervals were chosen."""
    n = points.size
    gain_end = np.arange(1, n + 1) / n - lam * points
    cost_start = np.arange(0, n) / n - lam * points
    best_value, best_arcs = 0.0, ()
    for wrap in (False, True):
        if wrap and n < 2:
            continue
        pieces = k + 1 if wrap else k
        closed = [(-math.inf, ())] * (pieces + 1)
        closed[0] = (0.0, ())
        opened: List[Tuple[float, tuple, int]] = [(-math.inf, (), -1)] * (pieces + 1)
        for t in range(n):
            for c in range(pieces, 0, -1):
                start_value = closed[c - 1][0] - cost_start[t]
                if start_value > opened[c][0]:
                    opened[c] = (start_value, closed[c - 1][1], t)
                close_value = opened[c][0] + gain_end[t]
                if close_value > closed[c][0]:
                    closed[c] = (close_value, opened[c][1] + ((opened[c][2], t),))
            if wrap and t == 0:
                closed[0] = (-math.inf, ())
                for c in range(2, pieces + 1):
                    opened[c] = (-math.inf, (), -1)
                    closed[c] = (-math.inf, ())
        if wrap:
            seam = lam * (points[0] + TWO_PI - points[-1])
            for c in range(2, pieces + 1):
                value = opened[c][0] + gain_end[-1] - seam
                if value > best_value:
                    pairs = opened[c][1] + ((opened[c][2], n - 1),)
                    # first piece [0, j] and last piece [i, n-1] form one arc from y_i to y_j
                    merged = ((pairs[-1][0], pairs[0][1]),) + pairs[1:-1]
                    best_value, best_arcs = value, merged
        else:
            for c in range(1, pieces + 1):
                if closed[c][0] > best_value:
                    best_value, best_arcs = closed[c]
    arcs = tuple(sorted((float(points[i]), float(points[j])) for i, j in best_arcs))
    return best_value, arcs


def empirical_excess_mass(sample: AngleSample, k: int, lam: float) -> ExcessMassValue:
    """E_{n,k}(λ): best total of P_n(C) - λ length(C) over k disjoint closed arcs."""
    _check_order(k)
    _require_distinct(sample)
    if not math.isfinite(lam) or lam <= 0.0:
        raise InvalidParameterError(f"Excess-mass level must be finite and positive, got {lam}")
    value, arcs = _best_family(sample.sorted, float(lam), int(k))
    return ExcessMassValue(int(k), float(lam), float(value), arcs)


def excess_mass_curve(sample: AngleSample, k: int, lambdas) -> np.ndarray:
    """E_{n,k}(λ) for every λ in ``lambdas``."""
    _check_order(k)
    _require_distinct(sample)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if np.any(lambdas <= 0.0) or not np.all(np.isfinite(lambdas)):
        raise InvalidParameterError("Excess-mass levels must be finite and positive.")
    return _excess_mass_table(sample.sorted, lambdas, int(k))[int(k)]


def candidate_levels(sample: AngleSample, cap: int = 2000) -> np.ndarray:
    """Empirical slopes (j - i) / (n (z_j - z_i)) over arcs of the doubled data, thinned to ``cap``."""
    points = sample.sorted
    n = points.size
    doubled = np.concatenate([points, points + TWO_PI])
    levels = []
    for step in range(1, n):
        span = doubled[step : step + n] - doubled[:n]
        span = span[span > 0.0]
        levels.append(step / (n * span))
    if not levels:
        return np.array([1.0 / TWO_PI])
    values = np.unique(np.concatenate(levels))
    if values.size > cap:
        picks = np.unique(np.round(np.linspace(0, values.size - 1, cap)).astype(int))
        values = values[picks]
    return values


def delta_statistic(sample: AngleSample, k: int, tuning: Tuning = DEFAULT_TUNING) -> DeltaStatistic:
    """Δ_{n,k+1} = max over λ of E_{n,k+1}(λ) - E_{n,k}(λ)."""
    _check_order(k)
    _require_distinct(sample)
    lambdas = candidate_levels(sample, tuning.lambda_cap)
    table = _excess_mass_table(sample.sorted, lambdas, int(k) + 1)
    gap = table[int(k) + 1] - table[int(k)]
    best = int(np.argmax(gap))
    return DeltaStatistic(int(k), max(float(gap[best]), 0.0), float(lambdas[best]))


def _delta_value(sample: AngleSample, k: int, tuning: Tuning) -> float:
    return delta_statistic(sample, k, tuning).delta


def excess_mass_test(  # pylint: disable=too-many-arguments
    sample: AngleSample,
    k: int = 1,
    B: int = 500,
    seed: int = 0,
    alpha: Optional[float] = None,
    tuning: Tuning = DEFAULT_TUNING,
    workers: int = 1,
) -> TestReport:
    """Smoothed-bootstrap calibration of Δ_{n,k+1} with resamples from f̂_{h_k}."""
    if alpha is not None and not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"Significance level must lie in (0, 1), got {alpha}")
    sample = AngleSample(sample.sorted)
    critical = critical_bandwidth(sample, k, tuning)
    observed = delta_statistic(sample, k, tuning)
    statistic = partial(_delta_value, k=int(k), tuning=tuning)
    replicates = bootstrap_replicates(sample, critical.h_k, B, seed, statistic, tuning, workers)
    p_value = bootstrap_p_value(observed.delta, replicates, tuning.p_value_rule)
    return TestReport(
        test="excess_mass",
        statistic="Delta",
        k=int(k),
        d_observed=observed.delta,
        h_k=critical.h_k,
        B=int(B),
        replicates=replicates,
        p_value=p_value,
        master_seed=int(seed),
        tuning=tuning.to_dict(),
        alpha=alpha,
        reject=None if alpha is None else p_value < alpha,
        floor_hit=critical.floor_hit,
    )


def watson_u2(sample: AngleSample, h: float, classical: bool = False) -> float:
    """U² between the empirical CDF and F̂_h at the order statistics.

    With D_i = i/n - F̂_h(X_(i)) the value is (1/n)(1/n) Σ (D_i - mean D)²; the
    ``classical`` variant scales by n instead of 1/n, i.e. Σ (D_i - mean D)².
    """
    n = sample.n
    if n < 2:
        raise InsufficientSampleError("U² needs at least two observations.")
    ordered = sample.sorted
    residual = np.arange(1, n + 1) / n - kde_cdf(KdeSpec(sample, h), ordered)
    spread = float(np.mean((residual - residual.mean()) ** 2))
    return spread * n if classical else spread / n


def _u2_value(sample: AngleSample, k: int, tuning: Tuning, classical: bool) -> float:
    h_k = critical_bandwidth(sample, k, tuning).h_k
    return watson_u2(sample, h_k, classical)


def fisher_marron_test(  # pylint: disable=too-many-arguments
    sample: AngleSample,
    k: int = 1,
    B: int = 500,
    seed: int = 0,
    alpha: Optional[float] = None,
    tuning: Tuning = DEFAULT_TUNING,
    workers: int = 1,
    classical: bool = False,
) -> TestReport:
    """U² at the critical bandwidth, calibrated by resampling from f̂_{h_k}."""
    if alpha is not None and not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"Significance level must lie in (0, 1), got {alpha}")
    sample = AngleSample(sample.sorted)
    critical = critical_bandwidth(sample, k, tuning)
    observed = watson_u2(sample, critical.h_k, classical)
    statistic = partial(_u2_value, k=int(k), tuning=tuning, classical=classical)
    replicates = bootstrap_replicates(sample, critical.h_k, B, seed, statistic, tuning, workers)
    p_value = bootstrap_p_value(observed, replicates, tuning.p_value_rule)
    return TestReport(
        test="fisher_marron",
        statistic="U2",
        k=int(k),
        d_observed=observed,
        h_k=critical.h_k,
        B=int(B),
        replicates=replicates,
        p_value=p_value,
        master_seed=int(seed),
        tuning=tuning.to_dict(),
        alpha=alpha,
        reject=None if alpha is None else p_value < alpha,
        floor_hit=critical.floor_hit,
    )


def curvature_ratios(
    sample: AngleSample, h_k: float, h2: float, eval_grid_size: int = 2048
) -> List[Tuple[float, float]]:
    """|f̂''_{h2}(x)| / f̂_{h_k}(x)³ at every mode and antimode x of f̂_{h_k}."""
    spec_k = KdeSpec(sample, h_k, eval_grid_size)
    spec_2 = KdeSpec(sample, h2, eval_grid_size)
    found = count_modes(spec_k)
    points = np.array(sorted(found.mode_locations + found.antimode_locations))
    density = np.atleast_1d(kde_density(spec_k, points))
    if np.any(density < 1e-12):
        where = float(points[int(np.argmin(density))])
        raise DivisionHazardError(f"Density at critical point {where:.6g} is below 1e-12; curvature ratio undefined.")
    curvature = np.abs(np.atleast_1d(kde_derivative(spec_2, points, order=2)))
    return [(float(x), float(c / f**3)) for x, c, f in zip(points, curvature, density)]
