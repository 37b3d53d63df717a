import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Callable, Dict, Optional

from .errors import InvalidSetting

LogFn = Callable[..., None]


@dataclass(frozen=True)
class Settings:
    period_cap: int = 8
    word_cap: int = 12
    subset_cap: int = 4096
    k_cap: Optional[int] = None
    max_workers: int = 4
    tie_band: float = 1e-7

    def with_options(self, options: Dict[str, str]) -> "Settings":
        updates = {}
        for key, value in options.items():
            field_name = OPTION_FIELDS.get(key)
            if field_name is None:
                raise InvalidSetting(f"Unknown option '{key}'")
            updates[field_name] = _parse_positive_int(key, value)
        return replace(self, **updates)

    def caps(self) -> Dict[str, object]:
        return {
            "P": self.period_cap,
            "L": self.word_cap,
            "K_cap": self.k_cap if self.k_cap is not None else "auto",
            "subset_cap": self.subset_cap,
        }


OPTION_FIELDS = {
    "P": "period_cap",
    "L": "word_cap",
    "K_cap": "k_cap",
    "subset_cap": "subset_cap",
    "workers": "max_workers",
}


def _parse_positive_int(name: str, raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise InvalidSetting(f"{name} must be an integer, got '{raw}'") from None
    if value < 1:
        raise InvalidSetting(f"{name} must be positive, got {value}")
    return value


def get_int_env(name: str, default: int) -> int:
    return _parse_positive_int(name, os.getenv(name, str(default)) or str(default))


def load_settings() -> Settings:
    k_cap_raw = os.getenv("SHIFTCHECK_K_CAP", "")
    tie_raw = os.getenv("SHIFTCHECK_TIE_BAND", "1e-7") or "1e-7"
    try:
        tie_band = float(tie_raw)
    except ValueError:
        raise InvalidSetting(f"SHIFTCHECK_TIE_BAND must be a number, got '{tie_raw}'") from None
    return Settings(
        period_cap=get_int_env("SHIFTCHECK_PERIOD_CAP", 8),
        word_cap=get_int_env("SHIFTCHECK_WORD_CAP", 12),
        subset_cap=get_int_env("SHIFTCHECK_SUBSET_CAP", 4096),
        k_cap=_parse_positive_int("SHIFTCHECK_K_CAP", k_cap_raw) if k_cap_raw else None,
        max_workers=get_int_env("SHIFTCHECK_MAX_WORKERS", 4),
        tie_band=tie_band,
    )


def get_worker_count(settings: Settings, target: int) -> int:
    return max(1, min(settings.max_workers, target))


def make_logger(verbose: bool = False, summary_json: bool = False) -> LogFn:
    def log(level: str, message: str, force: bool = False) -> None:
        if summary_json:
            return
        if not verbose and not force:
            return
        timestamp = datetime.now(timezone.utc).replace(tzinfo=None).isoformat() + "Z"
        print(f"{timestamp} [{level}] {message}", file=sys.stderr)

    return log


def quiet_log(level: str, message: str, force: bool = False) -> None:
    return None


def safe_call(label: str, func: Callable, default, log: Optional[LogFn] = None):
    try:
        return func()
    except Exception as exc:
        if log is None:
            print(f"{label} failed: {exc}", file=sys.stderr)
        else:
            log("WARN", f"{label} failed: {exc}", force=True)
        return default
