# -*- coding: utf-8 -*-
"""Likelihood-ratio multimodality test: the D_k statistic and its smoothed-bootstrap calibration.

D_k = 2 [max_{h>0} ℓ_CV(h) - max_{h>=h_k} ℓ_CV(h)] compares the best
cross-validation pseudo-likelihood over all bandwidths with the best one over
bandwidths whose kernel estimate has at most k modes. Its null distribution is
approximated by recomputing the statistic on resamples drawn from f̂_{h_k}.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .bands import critical_bandwidth, likelihood_profile
from .circdist import AngleSample, CircularModel, RngStream, model_sample
from .config import DEFAULT_TUNING, Tuning
from .errors import InvalidParameterError, TieError
from .kde import KdeSpec, kde_resample
from .parallel import ordered_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DkResult:  # pylint: disable=too-few-public-methods
    d: float
    h_k: float
    h_max: float
    h_H0: float
    floor_hit: bool = False


@dataclass(frozen=True)
class TestReport:  # pylint: disable=too-many-instance-attributes
    """Outcome of a calibrated multimodality test.

    ``statistic`` names what ``d_observed`` holds ("D_k", "Delta" or "U2").
    ``h_max`` and ``h_H0`` are only set for the likelihood-ratio test.
    """

    __test__ = False  # not a pytest class

    test: str
    statistic: str
    k: int
    d_observed: float
    h_k: float
    B: int
    replicates: Tuple[float, ...]
    p_value: float
    master_seed: int
    tuning: Dict[str, Any] = field(default_factory=dict)
    h_max: Optional[float] = None
    h_H0: Optional[float] = None
    alpha: Optional[float] = None
    reject: Optional[bool] = None
    floor_hit: bool = False
    reuse_critical_bandwidth: bool = False

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["replicates"] = list(self.replicates)
        return out


def dk_statistic(
    sample: AngleSample, k: int, tuning: Tuning = DEFAULT_TUNING, h_k: Optional[float] = None
) -> DkResult:
    """D_k for one sample.

    Args:
        sample: tie-free angles, n >= 2.
        k: number of modes under the null hypothesis.
        tuning: numerical settings.
        h_k: constraint bandwidth to use instead of the sample's own critical bandwidth.

    Returns:
        DkResult: the statistic (0 when the unconstrained maximizer already has
        h >= h_k) and the three bandwidths.
    """
    if sample.has_ties:
        raise TieError(sample.duplicates())
    # canonical order makes the result independent of the input order
    sample = AngleSample(sample.sorted)
    floor_hit = False
    if h_k is None:
        critical = critical_bandwidth(sample, k, tuning)
        h_k, floor_hit = critical.h_k, critical.floor_hit
    profile = likelihood_profile(sample, h_k, tuning)
    d = 2.0 * (profile.l_max - profile.l_H0)
    if floor_hit or abs(d) < tuning.clamp_tol:
        d = 0.0
    return DkResult(max(d, 0.0), float(h_k), profile.h_max, profile.h_H0, floor_hit)


def bootstrap_p_value(observed: float, replicates, rule: str = "strict") -> float:
    """Share of bootstrap replicates beyond the observed statistic.

    "strict" counts replicates strictly above ``observed`` and divides by B. An
    observed value of exactly 0 sits at the bottom of the statistic's support
    and gets p = 1. "conservative" is (1 + #{replicate >= observed}) / (B + 1).
    """
    values = np.asarray(replicates, dtype=float)
    if values.size == 0:
        raise InvalidParameterError("At least one bootstrap replicate is needed for a p-value.")
    if rule == "conservative":
        return float((1 + np.count_nonzero(values >= observed)) / (values.size + 1))
    if rule != "strict":
        raise InvalidParameterError(f"Unknown p-value rule '{rule}'")
    # overrides the strict count, which would give 0 when every replicate is also 0
    if observed == 0.0:
        return 1.0
    return float(np.count_nonzero(values > observed) / values.size)


def draw_tie_free(draw: Callable[[RngStream], AngleSample], stream: RngStream, retries: int) -> AngleSample:
    """Call ``draw`` until it returns a sample without repeated values.

    Retry i uses the sub-stream ``stream.derive(i)``.
    """
    current = stream
    for attempt in range(retries + 1):
        sample = draw(current)
        if not sample.has_ties:
            return sample
        logger.warning("Drawn sample has ties (%r); redrawing from a derived stream", current)
        current = stream.derive(attempt + 1)
    raise TieError(sample.duplicates())


def _resample_from(spec: KdeSpec, n: int, stream: RngStream) -> AngleSample:
    return kde_resample(spec, n, stream)


def _bootstrap_replicate(
    index: int,
    *,
    spec: KdeSpec,
    seed: int,
    statistic: Callable[[AngleSample], float],
    retries: int,
) -> float:
    resample = draw_tie_free(partial(_resample_from, spec, spec.n), RngStream(seed, index), retries)
    return statistic(resample)


def bootstrap_replicates(
    sample: AngleSample,
    h_k: float,
    B: int,
    seed: int,
    statistic: Callable[[AngleSample], float],
    tuning: Tuning = DEFAULT_TUNING,
    workers: int = 1,
) -> Tuple[float, ...]:
    """B values of ``statistic`` on resamples of size n from f̂_{h_k}; replicate b uses stream b."""
    if int(B) < 1:
        raise InvalidParameterError(f"Number of bootstrap resamples must be at least 1, got {B}")
    task = partial(
        _bootstrap_replicate,
        spec=KdeSpec(sample, h_k, tuning.eval_grid_size),
        seed=seed,
        statistic=statistic,
        retries=tuning.max_tie_retries,
    )
    return tuple(float(value) for value in ordered_map(task, range(int(B)), workers))


def _dk_value(sample: AngleSample, k: int, tuning: Tuning, h_k: Optional[float]) -> float:
    return dk_statistic(sample, k, tuning, h_k).d


def _check_alpha(alpha: Optional[float]):
    if alpha is not None and not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"Significance level must lie in (0, 1), got {alpha}")


def run_test(  # pylint: disable=too-many-arguments
    sample: AngleSample,
    k: int = 1,
    B: int = 500,
    seed: int = 0,
    alpha: Optional[float] = None,
    tuning: Tuning = DEFAULT_TUNING,
    workers: int = 1,
    reuse_critical_bandwidth: bool = False,
) -> TestReport:
    """Calibrated likelihood-ratio test of H0: at most k modes.

    Each replicate reruns the full pipeline (its own critical bandwidth and
    likelihood profile) unless ``reuse_critical_bandwidth`` pins the constraint
    to the observed sample's h_k.
    """
    _check_alpha(alpha)
    observed = dk_statistic(sample, k, tuning)
    logger.info(
        "D_%d=%.6g (h_k=%.6g, h_max=%.6g, h_H0=%.6g); drawing %d resamples",
        k,
        observed.d,
        observed.h_k,
        observed.h_max,
        observed.h_H0,
        B,
    )
    statistic = partial(_dk_value, k=k, tuning=tuning, h_k=observed.h_k if reuse_critical_bandwidth else None)
    replicates = bootstrap_replicates(sample, observed.h_k, B, seed, statistic, tuning, workers)
    p_value = bootstrap_p_value(observed.d, replicates, tuning.p_value_rule)
    return TestReport(
        test="likelihood_ratio",
        statistic="D_k",
        k=k,
        d_observed=observed.d,
        h_k=observed.h_k,
        B=int(B),
        replicates=replicates,
        p_value=p_value,
        master_seed=int(seed),
        tuning=tuning.to_dict(),
        h_max=observed.h_max,
        h_H0=observed.h_H0,
        alpha=alpha,
        reject=None if alpha is None else p_value < alpha,
        floor_hit=observed.floor_hit,
        reuse_critical_bandwidth=reuse_critical_bandwidth,
    )


def _draw_model(model: CircularModel, n: int, stream: RngStream) -> AngleSample:
    return model_sample(model, n, stream)


def _atom_run(index: int, *, model: CircularModel, n: int, k: int, seed: int, tuning: Tuning) -> float:
    sample = draw_tie_free(partial(_draw_model, model, n), RngStream(seed, index), tuning.max_tie_retries)
    return dk_statistic(sample, k, tuning).d


def null_statistic_atoms(  # pylint: disable=too-many-arguments
    model: CircularModel,
    n: int,
    M: int,
    k: int = 1,
    seed: int = 0,
    tuning: Tuning = DEFAULT_TUNING,
    workers: int = 1,
) -> Tuple[float, Tuple[float, ...]]:
    """Monte Carlo estimate of P(D_k = 0) and the nonzero values of D_k.

    Returns:
        tuple: (share of the M samples with D_k = 0, nonzero D_k values in run order)
    """
    if int(M) < 1:
        raise InvalidParameterError(f"Number of Monte Carlo runs must be at least 1, got {M}")
    task = partial(_atom_run, model=model, n=n, k=k, seed=seed, tuning=tuning)
    values = ordered_map(task, range(int(M)), workers)
    zeros = sum(1 for value in values if value == 0.0)
    return zeros / len(values), tuple(value for value in values if value != 0.0)


def format_p_value(p_value: float, B: int) -> str:
    if p_value == 0.0:
        return f"< {1.0 / B:.3g}"
    return f"{p_value:.3f}"


def format_report(report: TestReport) -> str:
    """Render a TestReport as human-readable text."""
    names = {
        "likelihood_ratio": "Likelihood-ratio multimodality test",
        "excess_mass": "Excess-mass test (unmodified calibration)",
        "fisher_marron": "Watson U2 smoothed-bootstrap test",
    }
    lines = [f"{names.get(report.test, report.test)} for H0: at most {report.k} mode(s)"]
    lines.append(f"  {report.statistic} = {report.d_observed:.6g}")
    lines.append(f"  h_{report.k} = {report.h_k:.6g}" + (" (floor hit)" if report.floor_hit else ""))
    if report.h_max is not None and report.h_H0 is not None:
        lines.append(f"  h_max = {report.h_max:.6g}, h_H0 = {report.h_H0:.6g}")
    lines.append(f"  p-value = {format_p_value(report.p_value, report.B)} (B = {report.B}, seed = {report.master_seed})")
    if report.alpha is not None:
        verdict = "rejected" if report.reject else "not rejected"
        lines.append(f"  H0 {verdict} at alpha = {report.alpha:g}")
    if not math.isclose(report.d_observed, 0.0) and report.p_value == 0.0:
        lines.append("  No resample exceeded the observed statistic.")
    return "\n".join(lines)
