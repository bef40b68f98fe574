"""
Geodesic Growth Toolkit - Utilities Module

Shared utilities for logging, JSON caching and word formatting.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Optional

from filelock import FileLock

from .config import LOGGING, PATHS


def setup_logger(name: str, log_dir: Optional[Path] = None) -> logging.Logger:
    """
    Set up a logger with consistent format across modules.

    Args:
        name: Logger name (typically module name)
        log_dir: Directory for log files. If None, uses LOGGING["DIR"]

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)

    formatter = logging.Formatter(
        fmt=LOGGING["FORMAT"],
        datefmt=LOGGING["DATE_FORMAT"]
    )

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # File handler (skipped when the log directory is unusable)
    log_dir = log_dir or LOGGING["DIR"]
    if log_dir is None:
        return logger
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_dir / f"{name}.log")
    except OSError as e:
        logger.debug(f"File logging disabled for {name}: {e}")
        return logger

    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    return logger


logger = setup_logger("utils")


def canonical_digest(payload) -> str:
    """
    SHA-256 of the canonical JSON encoding of payload.

    Used as the cache key for serialized balls and automata.
    """
    encoded = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(encoded.encode("utf-8")).hexdigest()


def _cache_file(kind: str, key: str) -> Optional[Path]:
    cache_dir = PATHS["CACHE_DIR"]
    if cache_dir is None:
        return None
    return cache_dir / kind / f"{key}.json"


def load_cached(kind: str, key: str) -> Optional[dict]:
    """
    Read a cached JSON document.

    Args:
        kind: Cache namespace ("ball", "automaton")
        key: Digest produced by canonical_digest

    Returns:
        Parsed document, or None when caching is off or the entry is missing
    """
    path = _cache_file(kind, key)
    if path is None or not path.is_file():
        return None

    with FileLock(str(path) + ".lock"):
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path.name}: {e}")
            return None


def store_cached(kind: str, key: str, document: dict) -> bool:
    """
    Write a JSON document to the cache.

    Returns:
        True if written, False when caching is off or the write failed
    """
    path = _cache_file(kind, key)
    if path is None:
        return False

    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        try:
            tmp = path.with_suffix(".tmp")
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump(document, f, sort_keys=True)
            tmp.replace(path)
            return True
        except OSError as e:
            logger.warning(f"Failed to write cache entry {path.name}: {e}")
            return False


def parse_int_range(text: str) -> tuple[int, int]:
    """Parse "a..b" (inclusive) into (a, b)."""
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ValueError(f"Expected a range like 0..3, got {text!r}")
    lo_i, hi_i = int(lo), int(hi)
    if lo_i < 0 or hi_i < lo_i:
        raise ValueError(f"Bad range {text!r}")
    return lo_i, hi_i
