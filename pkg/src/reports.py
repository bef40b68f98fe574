"""
Geodesic Growth Toolkit - Reports Module

Run reports as one self-describing JSON document (schema_version,
tool_version, config echo, results, timing) and a plain-text rendering
of the same data.
"""

import json
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from .config import REPORT, resolved_settings
from .errors import ConfigError
from .utils import setup_logger

logger = setup_logger("reports")

FORMAT_TEXT = "text"
FORMAT_JSON = "json"


class Report:
    """Per-command report accumulated stage by stage."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = dict(config)
        self.results: dict = {}
        self.timing: dict = {}

    @contextmanager
    def stage(self, name: str):
        """Time a stage; its seconds land in the timing block."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[name] = round(time.perf_counter() - start, 6)

    def add(self, key: str, value):
        self.results[key] = value

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT["SCHEMA_VERSION"],
            "tool_version": REPORT["TOOL_VERSION"],
            "command": self.command,
            "config": {**self.config, "settings": resolved_settings()},
            "results": self.results,
            "timing": self.timing,
        }


def dumps(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def strip_timing(document: dict) -> dict:
    """Copy of a report document without the timing block."""
    return {k: v for k, v in document.items() if k != "timing"}


def _render(value, indent: int, lines: list[str]):
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                _render(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_scalar(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                _render(item, indent + 1, lines)
            elif isinstance(item, list):
                lines.append(f"{pad}- " + ", ".join(_scalar(x) for x in item))
            else:
                lines.append(f"{pad}{_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")


def _scalar(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, dict)):
        return "[]" if isinstance(value, list) else "{}"
    return str(value)


def render_text(document: dict) -> str:
    lines = [f"{document['command']} (tool {document['tool_version']})"]
    _render(document["results"], 1, lines)
    if document.get("timing"):
        lines.append("timing:")
        for stage, seconds in document["timing"].items():
            lines.append(f"  {stage}: {seconds:.3f}s")
    return "\n".join(lines) + "\n"


def emit(report: Report, fmt: str = FORMAT_TEXT, output: Optional[Path] = None) -> str:
    """
    Render a report and write it to output (or return it for stdout).

    Returns:
        The rendered text
    """
    document = report.to_dict()
    text = dumps(document) if fmt == FORMAT_JSON else render_text(document)
    if output is not None:
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {output}")
    return text


def load_report(text: str) -> dict:
    """
    Parse a JSON report back into its document.

    Raises:
        ConfigError: if the text is not a report or has another schema version
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Report is not valid JSON: {e}")
    if not isinstance(document, dict) or "results" not in document:
        raise ConfigError("Report document has no results block")
    version = document.get("schema_version")
    if version != REPORT["SCHEMA_VERSION"]:
        raise ConfigError(f"Unsupported report schema version {version!r}")
    return document
