"""
acoustic-psnr Configuration
Loads settings from environment variables and configures logging
"""

import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from loguru import logger

# Load .env file if it exists
try:
    from dotenv import load_dotenv

    # Look for .env file in project root
    project_root = Path(__file__).parent.parent.parent.parent
    env_path = project_root / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    pass


@dataclass
class Settings:
    """Application settings loaded from environment variables"""

    # Worker pool
    threads: Optional[int] = None

    # Logging
    log_level: Optional[str] = None
    log_file: Optional[str] = None

    # Default output root for CLI runs
    output_dir: Optional[str] = None

    def __post_init__(self):
        """Load values from environment variables if not set"""
        env_threads = os.getenv("PSNR_THREADS")
        self.threads = self.threads or (int(env_threads) if env_threads else None)
        self.threads = self.threads or os.cpu_count() or 1
        self.log_level = self.log_level or os.getenv("PSNR_LOG_LEVEL", "INFO")
        self.log_file = self.log_file or os.getenv("PSNR_LOG_FILE")
        self.output_dir = self.output_dir or os.getenv("PSNR_OUTPUT_DIR", "runs")


# Global settings instance
settings = Settings()


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Install the loguru sinks used by the CLI

    Args:
        level: stderr log level (defaults to settings.log_level)
        log_file: optional rotating log file path
    """
    logger.remove()
    logger.add(sys.stderr, level=(level or settings.log_level).upper())

    log_file = log_file or settings.log_file
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(log_file, rotation="10 MB", level="DEBUG")


from .run_config import (  # noqa: E402
    RUN_CONFIG_FILE,
    SECTION_MODELS,
    AreaConfig,
    AugmentConfig,
    FitConfig,
    GenConfig,
    PsnrConfig,
    ReportConfig,
    TrainRunConfig,
    read_config_file,
    resolve_config,
    write_run_config,
)

__all__ = [
    "Settings",
    "settings",
    "configure_logging",
    "RUN_CONFIG_FILE",
    "SECTION_MODELS",
    "AreaConfig",
    "AugmentConfig",
    "FitConfig",
    "GenConfig",
    "PsnrConfig",
    "ReportConfig",
    "TrainRunConfig",
    "read_config_file",
    "resolve_config",
    "write_run_config",
]
