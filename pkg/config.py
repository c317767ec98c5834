"""
Configuration Management for the Stylized Facts toolkit

This module holds every tunable of a run. Defaults come from environment
variables (optionally loaded from a .env file), a JSON config file can
override them, and explicit command-line flags override both.

Environment Variables (all optional):
- STYLIZED_FACTS_OUTPUT_DIR: Where analyze/cluster/plot-data write results
- STYLIZED_FACTS_WORKERS: Number of worker processes for per-stock analysis
- STYLIZED_FACTS_SIGNIFICANCE: Test level used for every reject/accept decision
- STYLIZED_FACTS_SEED: Seed for the simulate subcommand
- STYLIZED_FACTS_LOG_LEVEL: Logging level name (INFO, DEBUG, ...)
- STYLIZED_FACTS_LOG_FILE: Optional log file written next to console output
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Load environment variables from .env file
# This must be called before accessing any environment variables
load_dotenv()

# =============================================================================
# Run Defaults
# =============================================================================
OUTPUT_DIR = os.getenv("STYLIZED_FACTS_OUTPUT_DIR", "./stylized_output")
WORKERS = int(os.getenv("STYLIZED_FACTS_WORKERS", "1"))
SIGNIFICANCE = float(os.getenv("STYLIZED_FACTS_SIGNIFICANCE", "0.05"))
SEED = int(os.getenv("STYLIZED_FACTS_SEED", "20240101"))

# =============================================================================
# Logging Configuration
# =============================================================================
LOG_LEVEL = os.getenv("STYLIZED_FACTS_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("STYLIZED_FACTS_LOG_FILE") or None

# Fields that never change analysis results; excluded from the config hash
_NON_RESULT_FIELDS = {"manifest_path", "output_dir", "workers", "log_level", "log_file"}


class VerdictThresholds(BaseModel):
    """Cutpoints of the per-market verdict rules (proportions are in [0, 1])"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gain_loss_share: float = 0.60
    leverage_verified: float = 0.54
    leverage_contradicted: float = 0.37
    heavy_tail_share: float = 0.75
    heavy_tail_range: Tuple[float, float] = (2.0, 5.0)
    volume_power_law_share: float = 1.0
    volume_volatility_positive: float = 0.95
    volume_volatility_negative: float = 0.50
    risk_return_band: float = 0.10
    time_scale_share: float = 0.60
    long_memory_share: float = 0.50
    long_memory_range: Tuple[float, float] = (0.55, 0.60)
    volume_memory_share: float = 1.0
    acf_decay_share: float = 0.50
    acf_decay_range: Tuple[float, float] = (0.2, 0.4)
    absence_verified: float = 0.50
    absence_contradicted: float = 0.40
    clustering_share: float = 0.80
    conditional_tail_verified: float = 0.70
    conditional_tail_contradicted: float = 0.51
    intermittency_share: float = 0.80
    taylor_range: Tuple[float, float] = (0.6, 1.4)


class RunConfig(BaseModel):
    """Everything a run needs; immutable once validated"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    manifest_path: Optional[str] = None
    output_dir: str = OUTPUT_DIR
    horizons: Tuple[int, ...] = (1, 5, 20, 60)
    overlapping: bool = True
    significance: float = SIGNIFICANCE
    absence_lags: int = 10
    clustering_lags: int = 5
    asymmetry_windows: Tuple[int, ...] = (5, 20)
    acf_decay_max_lag: int = 30
    taylor_interval: Tuple[float, float] = (0.125, 4.0)
    min_observations: int = 500
    use_adjusted_close: bool = False
    heavy_tail_xi_min: float = 0.05
    heavy_tail_vuong_z: float = 1.645
    workers: int = Field(default=WORKERS, ge=1)
    seed: int = SEED
    log_level: str = LOG_LEVEL
    log_file: Optional[str] = LOG_FILE
    verdict_thresholds: VerdictThresholds = Field(default_factory=VerdictThresholds)

    @field_validator("significance")
    @classmethod
    def _level_in_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("significance level must lie strictly between 0 and 1")
        return value

    @field_validator("horizons")
    @classmethod
    def _horizons_increasing(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value or any(h <= 0 for h in value):
            raise ValueError("horizons must be positive integers")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("horizons must be strictly increasing")
        return value

    @field_validator("asymmetry_windows")
    @classmethod
    def _supported_windows(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(w not in (5, 20) for w in value):
            raise ValueError("asymmetry windows must be 5 or 20 trading days")
        return value

    @model_validator(mode="after")
    def _taylor_interval_ordered(self) -> "RunConfig":
        lo, hi = self.taylor_interval
        if not 0.0 < lo < hi:
            raise ValueError("taylor_interval must satisfy 0 < lo < hi")
        return self

    def result_fields(self) -> Dict[str, Any]:
        """Fields that influence results, in canonical JSON-compatible form"""
        return self.model_dump(mode="json", exclude=_NON_RESULT_FIELDS)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.result_fields(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_run_config(
    config_file: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """
    Build a RunConfig from defaults, an optional JSON file, and flag overrides.

    Later sources win: defaults < config file < overrides. ``None`` values in
    ``overrides`` mean "flag not given" and are ignored.
    """
    values: Dict[str, Any] = {}
    if config_file:
        with open(config_file, "r") as f:
            values.update(json.load(f))

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "verdict_thresholds":
            merged = dict(values.get("verdict_thresholds", {}))
            merged.update(value)
            values[key] = merged
        else:
            values[key] = value

    return RunConfig(**values)


def parse_threshold_overrides(pairs: List[str]) -> Dict[str, Any]:
    """Parse KEY=VALUE strings from the command line into threshold overrides"""
    parsed: Dict[str, Any] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise ValueError(f"threshold override '{pair}' is not KEY=VALUE")
        parsed[key.strip()] = json.loads(raw)
    return parsed


def resolve_relative(base_file: str, path: str) -> str:
    """Resolve ``path`` relative to the directory holding ``base_file``"""
    candidate = Path(path)
    if candidate.is_absolute():
        return str(candidate)
    return str(Path(base_file).resolve().parent / candidate)
