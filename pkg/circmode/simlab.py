# -*- coding: utf-8 -*-
"""Model zoo and Monte Carlo study engine producing rejection-proportion tables."""

import io
import json
import logging
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .circdist import CircularModel, Mixture, RngStream, ScaledBeta, SineSkewedVonMises, VonMises, model_sample, stable_key
from .config import DEFAULT_TUNING, Tuning
from .emtest import excess_mass_test
from .errors import CircModeError, InvalidParameterError, StudyRunError
from .lrtest import draw_tie_free, run_test
from .parallel import ordered_map

logger = logging.getLogger(__name__)

PI = math.pi
TESTS = ("likelihood", "excess_mass")


def _vm_mixture(*parts: Tuple[float, float, float]) -> Mixture:
    """Mixture of von Mises laws from (weight, mu, kappa) triples."""
    return Mixture(tuple(w for w, _, _ in parts), tuple(VonMises(mu, kappa) for _, mu, kappa in parts))


class ModelZoo:  # pylint: disable=too-few-public-methods
    """Registry of the fifteen simulation models and their true number of modes."""

    def __init__(self):
        third = 1.0 / 3.0
        self.models: Dict[str, Dict] = {
            # Unimodal
            "M1": {"modes": 1, "model": VonMises(PI, 1.0)},
            "M2": {"modes": 1, "model": _vm_mixture((0.2, 2 * PI / 3, 3.0), (0.6, PI, 1.4), (0.2, 4 * PI / 3, 3.0))},
            "M3": {"modes": 1, "model": _vm_mixture((0.05, 2 * PI / 3, 7.0), (0.9, PI, 1.0), (0.05, 4 * PI / 3, 7.0))},
            "M4": {"modes": 1, "model": SineSkewedVonMises(PI, 1.0, -0.9)},
            "M5": {"modes": 1, "model": ScaledBeta(3.0, 2.0, PI / 2, 3 * PI / 2)},
            # Bimodal
            "M6": {"modes": 2, "model": _vm_mixture((0.5, PI - 1.25, 1.5), (0.5, PI + 1.25, 1.5))},
            "M7": {"modes": 2, "model": _vm_mixture((0.5, PI - 1.0, 1.5), (0.5, PI + 1.0, 1.5))},
            "M8": {"modes": 2, "model": _vm_mixture((0.5, 1.5, 4.0), (0.5, 3.0, 2.0))},
            "M9": {"modes": 2, "model": _vm_mixture((0.95, PI / 2, 6.0), (0.05, 3 * PI / 2, 3.0))},
            "M10": {"modes": 2, "model": _vm_mixture((0.9, PI / 2, 6.0), (0.1, 3 * PI / 2, 3.0))},
            # Trimodal
            "M11": {"modes": 3, "model": _vm_mixture((third, PI - 2.0, 7.0), (third, PI, 7.0), (third, PI + 2.0, 7.0))},
            "M12": {"modes": 3, "model": _vm_mixture((third, PI - 1.0, 7.0), (third, PI, 7.0), (third, PI + 1.0, 7.0))},
            "M13": {"modes": 3, "model": _vm_mixture((0.2, PI / 2, 6.0), (0.2, PI, 6.0), (0.6, 7 * PI / 4, 8.0))},
            "M14": {"modes": 3, "model": _vm_mixture((0.1, PI / 2, 6.0), (0.25, PI, 6.0), (0.65, 7 * PI / 4, 8.0))},
            "M15": {"modes": 3, "model": _vm_mixture((0.2, PI / 2, 6.0), (0.2, 6 * PI / 7, 6.0), (0.6, 7 * PI / 4, 8.0))},
        }

    def ids(self) -> List[str]:
        return list(self.models)

    def get_model(self, model_id: str) -> CircularModel:
        """Look up a model by id (e.g. "M6").

        Raises:
            InvalidParameterError: if the id is unknown.
        """
        try:
            return self.models[model_id]["model"]
        except KeyError as exc:
            raise InvalidParameterError(f"Unknown model '{model_id}'; known models are {', '.join(self.models)}") from exc

    def get_modes(self, model_id: str) -> Optional[int]:
        return self.models.get(model_id, {}).get("modes")


ZOO = ModelZoo()

# Models and null hypothesis covered by each table layout.
TABLE_LAYOUTS: Dict[str, Tuple[int, Tuple[str, ...]]] = {
    "table2": (1, ("M1", "M2", "M3", "M4", "M5")),
    "table3": (1, ("M6", "M7", "M8", "M9", "M10")),
    "table4": (2, ("M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8", "M9", "M10")),
    "table5": (2, ("M11", "M12", "M13", "M14", "M15")),
}


def model_zoo() -> List[Tuple[str, CircularModel]]:
    """All fifteen (model_id, model) pairs in table order."""
    return [(model_id, ZOO.get_model(model_id)) for model_id in ZOO.ids()]


@dataclass(frozen=True)
class StudyDesign:  # pylint: disable=too-many-instance-attributes
    models: Tuple[Tuple[str, CircularModel], ...]
    sample_sizes: Tuple[int, ...] = (100, 500, 1000)
    alphas: Tuple[float, ...] = (0.01, 0.05, 0.10)
    M: int = 1000
    B: int = 500
    k: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "models", tuple((str(mid), model) for mid, model in self.models))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.M < 1 or self.B < 1:
            raise InvalidParameterError(f"Need M >= 1 and B >= 1, got M={self.M}, B={self.B}")
        ids = [mid for mid, _ in self.models]
        if len(set(ids)) != len(ids):
            raise InvalidParameterError(f"Model ids must be unique, got {ids}")
        if any(n < 2 for n in self.sample_sizes):
            raise InvalidParameterError(f"Sample sizes must be at least 2, got {self.sample_sizes}")
        if any(not 0.0 < a < 1.0 for a in self.alphas):
            raise InvalidParameterError(f"Significance levels must lie in (0, 1), got {self.alphas}")

    @classmethod
    def from_ids(cls, model_ids: Sequence[str], **kwargs) -> "StudyDesign":
        return cls(tuple((mid, ZOO.get_model(mid)) for mid in model_ids), **kwargs)

    @classmethod
    def for_layout(cls, layout: str, **kwargs) -> "StudyDesign":
        """Design reproducing one of the table layouts (models and k)."""
        if layout not in TABLE_LAYOUTS:
            raise InvalidParameterError(f"Unknown table layout '{layout}'; choose from {', '.join(TABLE_LAYOUTS)}")
        k, ids = TABLE_LAYOUTS[layout]
        return cls.from_ids(ids, k=k, **kwargs)


@dataclass(frozen=True)
class StudyRow:  # pylint: disable=too-few-public-methods
    model_id: str
    n: int
    alpha: float
    rejection_proportion: float
    mc_standard_error: float


@dataclass(frozen=True)
class StudyResult:  # pylint: disable=too-few-public-methods
    rows: Tuple[StudyRow, ...]
    p_values: Dict[Tuple[str, int], Tuple[float, ...]] = field(default_factory=dict)
    alphas: Tuple[float, ...] = (0.01, 0.05, 0.10)


def run_stream(seed: int, model_id: str, n: int, run_index: int) -> RngStream:
    """Stream of one study run, reproducible without running the rest of the study."""
    return RngStream(seed, stable_key(model_id), (n, run_index))


def _study_run(
    run_index: int, *, design: StudyDesign, model_id: str, model: CircularModel, n: int, which_test: str, tuning: Tuning
):
    stream = run_stream(design.seed, model_id, n, run_index)
    try:
        sample = draw_tie_free(partial(model_sample, model, n), stream, tuning.max_tie_retries)
        bootstrap_seed = int(stream.derive(1).generator.integers(0, 2**63))
        if which_test == "likelihood":
            report = run_test(sample, design.k, design.B, bootstrap_seed, tuning=tuning)
        else:
            report = excess_mass_test(sample, design.k, design.B, bootstrap_seed, tuning=tuning)
    except CircModeError as exc:
        return run_index, None, f"{type(exc).__name__}: {exc}"
    return run_index, report.p_value, None


def _read_checkpoint(path: Path, design: StudyDesign, which_test: str) -> Dict[Tuple[str, int], Dict[int, float]]:
    done: Dict[Tuple[str, int], Dict[int, float]] = {}
    if not path.exists():
        return done
    with path.open("r", encoding="utf-8") as handle:
        for line_num, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                logger.warning("L%d: skipping unreadable checkpoint line in %s", line_num, path)
                continue
            if record.get("seed") != design.seed or record.get("test") != which_test or record.get("k") != design.k:
                continue
            if record.get("B") != design.B:
                continue
            done.setdefault((record["model"], int(record["n"])), {})[int(record["run"])] = float(record["p_value"])
    return done


def _append_checkpoint(path: Path, design: StudyDesign, which_test: str, model_id: str, n: int, p_values: Dict[int, float]):
    with path.open("a", encoding="utf-8", newline="\n") as handle:
        for run_index in sorted(p_values):
            record = {
                "seed": design.seed,
                "test": which_test,
                "k": design.k,
                "B": design.B,
                "model": model_id,
                "n": n,
                "run": run_index,
                "p_value": p_values[run_index],
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def run_study(
    design: StudyDesign,
    which_test: str = "likelihood",
    tuning: Tuning = DEFAULT_TUNING,
    workers: int = 1,
    checkpoint: Optional[Union[str, Path]] = None,
) -> StudyResult:
    """Rejection proportions of the chosen test over M simulated samples per (model, n).

    Runs already recorded in ``checkpoint`` (a JSON-lines file) are not
    recomputed; newly finished (model, n) blocks are appended to it.
    """
    if which_test not in TESTS:
        raise InvalidParameterError(f"Unknown test '{which_test}'; choose from {', '.join(TESTS)}")
    path = Path(checkpoint) if checkpoint is not None else None
    done = _read_checkpoint(path, design, which_test) if path is not None else {}

    rows: List[StudyRow] = []
    p_values: Dict[Tuple[str, int], Tuple[float, ...]] = {}
    for model_id, model in design.models:
        for n in design.sample_sizes:
            known = {r: p for r, p in done.get((model_id, n), {}).items() if r < design.M}
            missing = [r for r in range(design.M) if r not in known]
            if known:
                logger.info("Resuming %s n=%d: %d of %d runs found in checkpoint", model_id, n, len(known), design.M)
            task = partial(
                _study_run, design=design, model_id=model_id, model=model, n=n, which_test=which_test, tuning=tuning
            )
            fresh: Dict[int, float] = {}
            for run_index, p_value, problem in ordered_map(task, missing, workers):
                if problem is not None:
                    if path is not None and fresh:
                        _append_checkpoint(path, design, which_test, model_id, n, fresh)
                    raise StudyRunError(model_id, n, run_index, problem)
                fresh[run_index] = p_value
            if path is not None and fresh:
                _append_checkpoint(path, design, which_test, model_id, n, fresh)
            known.update(fresh)
            values = np.array([known[r] for r in range(design.M)])
            p_values[(model_id, n)] = tuple(float(v) for v in values)
            for alpha in design.alphas:
                share = float(np.mean(values < alpha))
                rows.append(StudyRow(model_id, n, alpha, share, math.sqrt(share * (1.0 - share) / design.M)))
            logger.info("%s n=%d done (%d runs)", model_id, n, design.M)
    return StudyResult(tuple(rows), p_values, design.alphas)


def alpha_label(alpha: float) -> str:
    return f"{alpha * 100:g}%"


def round_proportion(value: float) -> str:
    """Three decimals, half away from zero on the shortest decimal representation."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def export_table(result: StudyResult, layout: Optional[str] = None) -> str:
    """CSV text with columns model, size and one column per significance level.

    ``layout`` keeps only the models of that table layout, in table order.
    """
    labels = [alpha_label(alpha) for alpha in result.alphas]
    cells: Dict[Tuple[str, int], Dict[str, str]] = {}
    order: List[Tuple[str, int]] = []
    for row in result.rows:
        key = (row.model_id, row.n)
        if key not in cells:
            cells[key] = {}
            order.append(key)
        cells[key][alpha_label(row.alpha)] = round_proportion(row.rejection_proportion)
    if layout is not None:
        if layout not in TABLE_LAYOUTS:
            raise InvalidParameterError(f"Unknown table layout '{layout}'; choose from {', '.join(TABLE_LAYOUTS)}")
        wanted = TABLE_LAYOUTS[layout][1]
        order = sorted((key for key in order if key[0] in wanted), key=lambda key: (wanted.index(key[0]), key[1]))
    records = [
        {"model": mid, "size": str(n), **{label: cells[(mid, n)].get(label, "") for label in labels}} for mid, n in order
    ]
    frame = pd.DataFrame(records, columns=["model", "size"] + labels)
    return frame.to_csv(index=False, lineterminator="\n")


def parse_table(text: str, M: Optional[int] = None) -> StudyResult:
    """Read back a CSV written by ``export_table``.

    The CSV carries no standard errors; they are recomputed when the number of
    Monte Carlo runs ``M`` is given and left at 0 otherwise.
    """
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    alpha_columns = [column for column in frame.columns if column not in ("model", "size")]
    alphas = tuple(float(column.rstrip("%")) / 100.0 for column in alpha_columns)
    rows = []
    for record in frame.to_dict("records"):
        for column, alpha in zip(alpha_columns, alphas):
            if record[column] == "":
                continue
            share = float(record[column])
            error = math.sqrt(share * (1.0 - share) / M) if M else 0.0
            rows.append(StudyRow(record["model"], int(record["size"]), alpha, share, error))
    return StudyResult(tuple(rows), {}, alphas)
