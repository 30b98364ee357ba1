"""Solver configuration settings."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


@dataclass
class SolverConfig:
    """Defaults shared by the library and the command line."""

    # Discretization
    nodes: int = 64
    kmax: int = 20

    # Flows
    samples: int = 40

    # Minimizer
    seed: int = 0
    starts: int = 8
    max_iterations: int = 4000
    workers: int = 1

    # Output
    output_format: str = "csv"
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> SolverConfig:
        """Load configuration from environment variables."""
        return cls(
            nodes=int(os.getenv("SHARPSPHERE_NODES", "64")),
            kmax=int(os.getenv("SHARPSPHERE_KMAX", "20")),
            samples=int(os.getenv("SHARPSPHERE_SAMPLES", "40")),
            seed=int(os.getenv("SHARPSPHERE_SEED", "0")),
            starts=int(os.getenv("SHARPSPHERE_STARTS", "8")),
            max_iterations=int(os.getenv("SHARPSPHERE_MAX_ITERATIONS", "4000")),
            workers=int(os.getenv("SHARPSPHERE_WORKERS", "1")),
            output_format=os.getenv("SHARPSPHERE_FORMAT", "csv").lower(),
            log_level=os.getenv("SHARPSPHERE_LOG_LEVEL", "WARNING").upper(),
        )


@dataclass
class RunConfig:
    """Validated parameters of one command-line run."""

    d: float = 3.0
    p: float = 4.0
    nodes: int = 64
    kmax: int = 20
    tmax: float | None = None
    samples: int = 40
    seed: int = 0
    starts: int = 8
    beta: float = 1.0
    eps: float = 0.1
    format: str = "csv"
    out: Path | None = None

    def validate(self) -> RunConfig:
        """Check module preconditions; raise ConfigError on the first violation."""
        if not self.d >= 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if not self.p >= 1:
            raise ConfigError(f"p must be >= 1, got {self.p}")
        if self.nodes < 2:
            raise ConfigError(f"nodes must be >= 2, got {self.nodes}")
        if self.kmax < 1 or self.kmax > self.nodes // 2:
            raise ConfigError(
                f"kmax must lie in [1, nodes/2] = [1, {self.nodes // 2}], got {self.kmax}"
            )
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if self.tmax is not None and not self.tmax > 0:
            raise ConfigError(f"tmax must be positive, got {self.tmax}")
        if self.starts < 1:
            raise ConfigError(f"starts must be >= 1, got {self.starts}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        return self


# Global config instance
_config: SolverConfig | None = None


def get_config() -> SolverConfig:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = SolverConfig.from_env()
    return _config


def reset_config() -> None:
    """Forget the cached configuration so the environment is read again."""
    global _config
    _config = None
