import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from shiftcheck import __version__
from shiftcheck.dynamics.models import CoverSymbol, RayPoint, Word, symbol_name, word_name
from shiftcheck.dynamics.utils import Settings


@dataclass
class Report:
    command: str
    target: str
    holds: bool
    lines: List[str] = field(default_factory=list)
    fields: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Any] = None
    error: str = ""

    @property
    def exit_code(self) -> int:
        return 0 if self.holds else 1

    def add(self, key: str, value: Any, line: Optional[str] = None) -> None:
        self.fields[key] = value
        self.lines.append(line if line is not None else f"{key}: {format_value(value)}")


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9f}"
    return str(value)


def format_witness(witness: Any) -> str:
    if isinstance(witness, (RayPoint, Word)):
        return str(witness)
    if isinstance(witness, CoverSymbol):
        return witness.name
    if isinstance(witness, dict):
        items = sorted((symbol_name(key), format_witness(value)) for key, value in witness.items())
        return "{" + ", ".join(f"{key}->{value}" for key, value in items) + "}"
    if isinstance(witness, (tuple, list)):
        if witness and all(isinstance(item, str) for item in witness):
            return word_name(witness)
        return "(" + ", ".join(format_witness(item) for item in witness) + ")"
    return symbol_name(witness)


def format_header(settings: Settings) -> str:
    caps = " ".join(f"{key}={value}" for key, value in settings.caps().items())
    return f"# shiftcheck {__version__} {caps}"


def build_message(report: Report, settings: Settings) -> str:
    lines = [format_header(settings), f"command: {report.command} {report.target}".rstrip()]
    lines.extend(report.lines)
    if report.error:
        lines.append(f"error: {report.error}")
    if report.witness is not None:
        lines.append(f"witness: {format_witness(report.witness)}")
    lines.extend(["", "summary:", f"holds: {format_value(report.holds)}", f"exit: {report.exit_code}"])
    return "\n".join(lines)


def build_json(report: Report, settings: Settings) -> str:
    document: Dict[str, Any] = {
        "version": __version__,
        "command": report.command,
        "target": report.target,
        "holds": report.holds,
        "exit": report.exit_code,
    }
    for key, value in settings.caps().items():
        document[f"cap_{key}"] = value
    for key, value in report.fields.items():
        document[key] = value if isinstance(value, (bool, int, str)) else format_value(value)
    if report.error:
        document["error"] = report.error
    if report.witness is not None:
        document["witness"] = format_witness(report.witness)
    return json.dumps(document, ensure_ascii=True, sort_keys=True)
