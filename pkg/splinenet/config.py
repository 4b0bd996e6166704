"""
Configuration management for SplineNet
"""
import logging
import sys
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI defaults, overridable through SPLINENET_* environment variables"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPLINENET_",
        case_sensitive=False,
        extra="ignore",
        env_ignore_empty=True
    )

    # Logging
    log_level: str = "INFO"

    # Training (full-batch AdaGrad)
    default_width: int = 200
    default_lambda: float = 1e-5
    learning_rate: float = 0.14
    epochs: int = 300_000
    adagrad_epsilon: float = 1e-10
    init_scale: float = 1.0
    init_output_scale: float = 0.25
    log_every: int = 0

    # Spline conversion
    knot_merge_rtol: float = 1e-9
    coeff_prune_ratio: float = 1e-12
    reduce_rtol: float = 1e-12

    # Oracle (grid-based convex solver)
    oracle_grid_factor: int = 20
    oracle_tol: float = 1e-10
    oracle_max_iters: int = 200_000

    # Admissibility classifier
    admissibility_tolerance: float = 1e-6
    admissibility_points: int = 200
    admissibility_log_range: float = 3.0

    # Experiment output
    sample_points: int = 1000
    sample_margin: float = 0.1


# Global settings instance
settings = Settings()


PROGRESS_LOGGER = "splinenet.progress"


class StderrHandler(logging.StreamHandler):
    """StreamHandler bound to whatever sys.stderr is at emit time"""

    def __init__(self, fmt: str):
        super().__init__()
        self.setFormatter(logging.Formatter(fmt))

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value) -> None:
        pass


def _install(logger: logging.Logger, fmt: str) -> None:
    for handler in [h for h in logger.handlers if isinstance(h, StderrHandler)]:
        logger.removeHandler(handler)
    logger.addHandler(StderrHandler(fmt))


def configure_logging(level: Optional[str] = None) -> None:
    """
    Install stderr handlers for the package loggers

    The progress channel carries bare CSV lines, everything else gets a
    level/name prefix. Calling it again replaces the handlers it installed
    earlier.
    """
    level = (level or settings.log_level).upper()

    root = logging.getLogger("splinenet")
    root.setLevel(level)
    _install(root, "%(levelname)s %(name)s: %(message)s")

    progress = logging.getLogger(PROGRESS_LOGGER)
    progress.setLevel(logging.INFO)
    progress.propagate = False
    _install(progress, "%(message)s")
