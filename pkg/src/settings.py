#!/usr/bin/env python3
"""
Run Settings
============

Numeric defaults for every command, and the TML_GRID_SCALE lookup that
multiplies all default grids. The scale is searched in the environment, then
a project .env file, then ~/.env.
"""

import logging
import os
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

GRID_SCALE_VAR = "TML_GRID_SCALE"

# smallest tube transport grid that resolves the framing twist
MIN_NS = 512
MIN_NT = 256


class ConfigError(ValueError):
    """Invalid configuration value"""


def find_grid_scale() -> int:
    """
    Find TML_GRID_SCALE from:
    1. Environment variable
    2. .env file in project directory
    3. .env file in user's home directory
    Defaults to 1.
    """
    value = os.getenv(GRID_SCALE_VAR)
    source = "environment"

    if value is None:
        project_env = Path(__file__).parent.parent / ".env"
        if project_env.exists():
            value = _load_from_env_file(project_env)
            source = str(project_env)

    if value is None:
        home_env = Path.home() / ".env"
        if home_env.exists():
            value = _load_from_env_file(home_env)
            source = str(home_env)

    if value is None:
        return 1

    try:
        scale = int(value)
    except ValueError:
        raise ConfigError(f"{GRID_SCALE_VAR}={value!r} from {source} is not an integer") from None
    if scale < 1:
        raise ConfigError(f"{GRID_SCALE_VAR} must be >= 1, got {scale} from {source}")
    logger.info(f"Grid scale {scale} from {source}")
    return scale


def _load_from_env_file(env_path: Path) -> Optional[str]:
    """Read one KEY=value line from a .env file"""
    try:
        with open(env_path, 'r') as f:
            for line in f:
                if line.startswith(f"{GRID_SCALE_VAR}="):
                    return line.split('=', 1)[1].strip().strip('"').strip("'")
    except OSError as e:
        logger.warning(f"Could not read {env_path}: {e}")
    return None


@dataclass(frozen=True)
class RunConfig:
    """Grids, steps, tolerances and seed shared by the commands and verify-all"""
    # Maslov / geometry
    samples: int = 256
    winding_residual: float = 0.05

    # Hamiltonian rotation
    flow_step: float = 1.0 / 1024
    flow_tolerance: float = 1e-8
    symplectic_tolerance: float = 1e-6

    # Tube transport
    ns: int = 1024
    nt: int = 256
    eps: float = 0.05

    # Linking
    linking_grid: int = 64
    linking_eps: float = 0.1
    linking_residual: float = 0.05
    oracle_grid: int = 48

    # Word suites
    tau_length: int = 10
    random_words: int = 1000
    random_word_length: int = 12
    scan_bound: int = 9
    relation_bound: int = 20
    match_bound: int = 25

    seed: int = 0
    frame_closure: float = 1e-6

    def validate(self) -> "RunConfig":
        if self.ns < MIN_NS or self.nt < MIN_NT:
            raise ConfigError(f"transport grid Ns={self.ns}, Nt={self.nt} below the minimum {MIN_NS}x{MIN_NT}")
        if self.samples < 64:
            raise ConfigError(f"samples must be >= 64, got {self.samples}")
        if self.linking_grid < 16 or self.oracle_grid < 16:
            raise ConfigError("linking grids must be >= 16")
        for name in ("winding_residual", "flow_step", "flow_tolerance", "symplectic_tolerance",
                     "eps", "linking_eps", "linking_residual", "frame_closure"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if min(self.tau_length, self.random_words, self.random_word_length,
               self.scan_bound, self.relation_bound, self.match_bound) < 1:
            raise ConfigError("word suite sizes must be >= 1")
        return self

    def scaled(self, scale: int) -> "RunConfig":
        """Multiply the default grids by an integer scale"""
        if scale < 1:
            raise ConfigError(f"grid scale must be >= 1, got {scale}")
        return replace(self, samples=self.samples * scale, ns=self.ns * scale, nt=self.nt * scale,
                       linking_grid=self.linking_grid * scale)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(**overrides) -> RunConfig:
    """Defaults scaled by TML_GRID_SCALE, then explicit overrides, validated"""
    config = RunConfig().scaled(find_grid_scale())
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **overrides).validate()
