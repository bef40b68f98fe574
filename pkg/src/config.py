"""
Geodesic Growth Toolkit - Configuration Module

Central configuration consumed by every stage. Uses environment variables
for machine-specific values with defaults sized for desk-scale runs.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env file with explicit path search so it works regardless of CWD
_ENV_FILE_LOADED = None
_ENV_SEARCH_PATHS = [
    Path(__file__).resolve().parent.parent / ".env",  # repo root
]

for _candidate in _ENV_SEARCH_PATHS:
    if _candidate.is_file():
        load_dotenv(_candidate)
        _ENV_FILE_LOADED = str(_candidate)
        break
else:
    load_dotenv()  # fallback to dotenv default CWD search

DATA_DIR = Path(__file__).resolve().parent / "data"

_cache_dir = os.getenv("GEOGROWTH_CACHE_DIR")
_log_dir = os.getenv("GEOGROWTH_LOG_DIR", str(Path.home() / ".geogrowth" / "log"))

# Paths
PATHS = {
    "GROUPS_DIR": Path(os.getenv("GEOGROWTH_GROUPS_DIR", str(DATA_DIR / "groups"))),  # Group definition files
    "CACHE_DIR": Path(_cache_dir).expanduser() if _cache_dir else None,              # Serialized balls/automata
}

# Resource caps
LIMITS = {
    "BALL_CAP": int(os.getenv("GEOGROWTH_BALL_CAP", "10000000")),        # Max ball entries
    "STATE_CAP": int(os.getenv("GEOGROWTH_STATE_CAP", "2000000")),       # Max automaton states
    "SCALE_CAP": int(os.getenv("GEOGROWTH_SCALE_CAP", "64")),            # Max N in scale searches
    "GENERATION_CHECK_RADIUS": int(os.getenv("GEOGROWTH_GENERATION_RADIUS", "6")),
    "DETERMINANT_MAX_DIM": int(os.getenv("GEOGROWTH_DETERMINANT_MAX_DIM", "60")),
    "EXPANSION_WORD_CAP": int(os.getenv("GEOGROWTH_EXPANSION_WORD_CAP", "200000")),
}

# Processing settings
PROCESSING = {
    "WORKERS": int(os.getenv("GEOGROWTH_WORKERS", "1")),                 # Processes for word sweeps
    "SERIES_GUARD_FACTOR": int(os.getenv("GEOGROWTH_SERIES_GUARD", "2")),
    "FFT_SCAN_RADIUS": int(os.getenv("GEOGROWTH_FFT_SCAN_RADIUS", "6")),
}

# Logging settings
LOGGING = {
    "DIR": Path(_log_dir).expanduser() if _log_dir else None,
    "FORMAT": "%(asctime)s | %(levelname)s | %(name)s | %(message)s",
    "DATE_FORMAT": "%Y-%m-%d %H:%M:%S",
}

# Report settings
REPORT = {
    "TOOL_VERSION": "0.3.0",
    "SCHEMA_VERSION": 1,
}


def ensure_paths_exist():
    """Create the cache and log directories on startup."""
    if PATHS["CACHE_DIR"] is not None:
        PATHS["CACHE_DIR"].mkdir(parents=True, exist_ok=True)
    if LOGGING["DIR"] is not None:
        LOGGING["DIR"].mkdir(parents=True, exist_ok=True)


def resolved_settings() -> dict:
    """Plain-data view of the configuration for report echoes."""
    return {
        "groups_dir": str(PATHS["GROUPS_DIR"]),
        "cache_dir": str(PATHS["CACHE_DIR"]) if PATHS["CACHE_DIR"] else None,
        "ball_cap": LIMITS["BALL_CAP"],
        "state_cap": LIMITS["STATE_CAP"],
        "scale_cap": LIMITS["SCALE_CAP"],
        "workers": PROCESSING["WORKERS"],
    }
