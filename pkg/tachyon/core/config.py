"""
Configuration Management
Validated settings for precision ladders, root searches, scans and logging
"""

import os
from functools import lru_cache
from typing import TYPE_CHECKING

from pydantic_settings import BaseSettings, SettingsConfigDict

from tachyon import __version__
from tachyon.core.logging import get_logger

if TYPE_CHECKING:
    from tachyon.core.numerics import PrecisionPolicy

logger = get_logger(__name__)


class Settings(BaseSettings):
    """
    Application Settings

    Every field can be overridden through a TACHYON_* environment variable
    or a .env file; command-line flags override both.
    """

    model_config = SettingsConfigDict(
        env_prefix="TACHYON_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # ============================================
    # APPLICATION
    # ============================================
    APP_NAME: str = "tachyon-selfforce"
    VERSION: str = __version__
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # ============================================
    # PRECISION LADDER
    # ============================================
    START_DIGITS: int = 50
    GROWTH_FACTOR: int = 2
    AGREEMENT_TOL: str = "1e-10"
    MAX_DIGITS: int = 1600
    NEAR_ZERO_EXPONENT: int = 300

    # ============================================
    # NULL-CONE ROOT SEARCH
    # ============================================
    ROOT_GRID_MAX_STEP: str = "1e-2"
    TAU_EXCLUSION: str = "1e-6"
    CERENKOV_FLOOR_MARGIN: int = 10

    # ============================================
    # SCANS
    # ============================================
    EXCLUSION_RADIUS: str = "0.05"
    WORKERS: int = 0  # 0 = all available cores

    # ============================================
    # TUNNELING
    # ============================================
    TUNNEL_STEP: float = 1e-3
    TUNNEL_RESIDUAL_TOL: float = 1e-12

    # ============================================
    # LOGGING
    # ============================================
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "logs/tachyon.log"
    LOG_MAX_BYTES: int = 10 * 1024 * 1024
    LOG_BACKUP_COUNT: int = 5
    LOG_JSON_CONSOLE: bool = False

    def __init__(self, **kwargs):
        """
        Initialize settings with validation
        Raises ValueError if the precision or logging setup is inconsistent
        """
        super().__init__(**kwargs)

        self._validate_precision()
        self._validate_logging()

    def _validate_precision(self):
        """Validate precision ladder configuration"""
        if self.START_DIGITS < 15:
            raise ValueError(
                f"START_DIGITS must be at least 15 (got {self.START_DIGITS})"
            )

        if self.MAX_DIGITS < self.START_DIGITS:
            raise ValueError(
                f"MAX_DIGITS ({self.MAX_DIGITS}) must not be below START_DIGITS ({self.START_DIGITS})"
            )

        if self.GROWTH_FACTOR < 2:
            raise ValueError("GROWTH_FACTOR must be an integer of at least 2")

        tol = float(self.AGREEMENT_TOL)
        if not 0 < tol < 1:
            raise ValueError(f"AGREEMENT_TOL must lie in (0, 1) (got {self.AGREEMENT_TOL})")

    def _validate_logging(self):
        """Validate logging configuration"""
        if self.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"LOG_LEVEL must be a standard level name (got {self.LOG_LEVEL})")

    @property
    def workers(self) -> int:
        """Effective worker count (0 resolves to the CPU count)"""
        if self.WORKERS > 0:
            return self.WORKERS
        return os.cpu_count() or 1

    def default_policy(self) -> "PrecisionPolicy":
        """Precision policy built from the ladder settings"""
        from tachyon.core.numerics import PrecisionPolicy

        return PrecisionPolicy(
            start_digits=self.START_DIGITS,
            growth_factor=self.GROWTH_FACTOR,
            agreement_tol=self.AGREEMENT_TOL,
            max_digits=self.MAX_DIGITS,
            near_zero_exponent=self.NEAR_ZERO_EXPONENT,
        )


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance
    """
    return Settings()


# Global settings instance
settings = get_settings()


# ============================================
# CONFIGURATION SUMMARY
# ============================================

def print_config_summary():
    """Log the effective configuration"""
    logger.info("=" * 60)
    logger.info("CONFIGURATION SUMMARY")
    logger.info("=" * 60)
    logger.info(f"Environment: {settings.ENVIRONMENT}")
    logger.info(
        f"Precision ladder: {settings.START_DIGITS} -> x{settings.GROWTH_FACTOR} "
        f"-> {settings.MAX_DIGITS} digits, tol {settings.AGREEMENT_TOL}"
    )
    logger.info(f"Root grid step: {settings.ROOT_GRID_MAX_STEP}, tau exclusion {settings.TAU_EXCLUSION}")
    logger.info(f"Scan exclusion radius: {settings.EXCLUSION_RADIUS}")
    logger.info(f"Workers: {settings.workers}")
    logger.info(f"Log file: {settings.LOG_FILE} ({settings.LOG_LEVEL})")
    logger.info("=" * 60)
