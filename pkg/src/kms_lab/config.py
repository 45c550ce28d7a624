"""Run configuration: plain-text ``key = value`` files merged under command-line flags."""
from __future__ import annotations

from pathlib import Path

# keys that do not change results and so stay out of the config hash
OUTPUT_KEYS = frozenset({"out", "csv", "config", "workers"})


def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; blank lines are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def load_config(path: str | Path | None) -> dict[str, str]:
    if path is None:
        return {}
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def resolve(defaults: dict, file_values: dict, cli_values: dict, types: dict) -> dict:
    """defaults < config file < explicit flags; file strings are cast with ``types``."""
    merged = dict(defaults)
    for key, value in file_values.items():
        cast = types.get(key, str)
        merged[key] = cast(value) if isinstance(value, str) else value
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    return merged


def hashed_view(config: dict) -> dict:
    return {k: v for k, v in sorted(config.items()) if k not in OUTPUT_KEYS}
