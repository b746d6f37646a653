"""Process-level settings for fairsim.

Settings here never change simulation outcomes; everything that does lives in
the scenario document.
"""

import os
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

# Load environment variables from .env file if it exists
load_dotenv()

_TRUTHY = {"1", "true", "yes", "on"}


@dataclass
class SimulatorSettings:
    """Settings read from the environment."""
    log_level: str = "INFO"
    log_file: Optional[str] = None
    output_dir: str = "fairsim-out"
    workers: int = 1
    export_trace: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return asdict(self)


def get_log_level() -> str:
    """Get the log level from FAIRSIM_LOG_LEVEL."""
    return os.getenv("FAIRSIM_LOG_LEVEL", "INFO")


def get_log_file() -> Optional[str]:
    """Get the optional log file path from FAIRSIM_LOG_FILE."""
    return os.getenv("FAIRSIM_LOG_FILE") or None


def get_output_dir() -> Path:
    """Get the default output directory from FAIRSIM_OUTPUT_DIR."""
    return Path(os.getenv("FAIRSIM_OUTPUT_DIR", "fairsim-out"))


def get_workers() -> int:
    """Get the sweep worker count from FAIRSIM_WORKERS."""
    raw = os.getenv("FAIRSIM_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def get_export_trace() -> bool:
    """Whether runs export trace.ndjson by default (FAIRSIM_TRACE)."""
    return os.getenv("FAIRSIM_TRACE", "").strip().lower() in _TRUTHY


def load_settings() -> SimulatorSettings:
    """Load settings from the environment, falling back to defaults."""
    return SimulatorSettings(
        log_level=get_log_level(),
        log_file=get_log_file(),
        output_dir=str(get_output_dir()),
        workers=get_workers(),
        export_trace=get_export_trace(),
    )
