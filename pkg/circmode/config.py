# -*- coding: utf-8 -*-
"""Numerical tuning knobs and seed resolution."""

import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError

SEED_ENV_VAR = "CIRCMODE_SEED"


@dataclass(frozen=True)
class Tuning:  # pylint: disable=too-many-instance-attributes
    """Every tolerance and grid size used by the bandwidth searches and the tests.

    A copy of ``to_dict()`` is stored in each report so results can be traced
    back to the settings that produced them.
    """

    h_floor: float = 1e-4
    h_ceil: float = 10.0
    bracket_tol_rel: float = 1e-4
    profile_grid_size: int = 100
    golden_tol_rel: float = 1e-5
    clamp_tol: float = 1e-9
    max_tie_retries: int = 3
    eval_grid_size: int = 2048
    lambda_cap: int = 2000
    p_value_rule: str = "strict"

    def __post_init__(self):
        if not 0 < self.h_floor < self.h_ceil:
            raise InvalidParameterError(f"Need 0 < h_floor < h_ceil, got {self.h_floor} and {self.h_ceil}")
        if self.p_value_rule not in ("strict", "conservative"):
            raise InvalidParameterError(f"Unknown p-value rule '{self.p_value_rule}'")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_TUNING = Tuning()


def resolve_seed(seed: Optional[int] = None) -> Tuple[int, str]:
    """Pick the master seed: explicit value, then $CIRCMODE_SEED, then fresh entropy.

    Returns:
        tuple: (seed, source) where source is "argument", "environment" or "entropy".
    """
    if seed is not None:
        return int(seed), "argument"
    from_env = os.environ.get(SEED_ENV_VAR, "").strip()
    if from_env:
        try:
            return int(from_env), "environment"
        except ValueError as exc:
            raise InvalidParameterError(f"{SEED_ENV_VAR} must be an integer, got '{from_env}'") from exc
    # 63 bits keeps the value representable as a JSON integer everywhere
    return int(np.random.SeedSequence().entropy) % (2**63), "entropy"
