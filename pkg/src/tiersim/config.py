"""Tiny key=value config format used by run configs, workload specs and
tier presets.  Lines are ``key = value``; ``#`` starts a comment.  Sizes
accept binary suffixes (KiB/MiB/GiB) and decimal ones (KB/MB/GB)."""

from __future__ import annotations

from .errors import ConfigError

_SUFFIXES = {
    "kib": 1024, "mib": 1024 ** 2, "gib": 1024 ** 3,
    "kb": 10 ** 3, "mb": 10 ** 6, "gb": 10 ** 9,
    "k": 1024, "m": 1024 ** 2, "g": 1024 ** 3,
}


def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        out[key.strip()] = val.strip()
    return out


def parse_size(s: str) -> int:
    s = s.strip()
    low = s.lower()
    for suffix, mult in _SUFFIXES.items():
        if low.endswith(suffix):
            num = s[: -len(suffix)].strip()
            return int(float(num) * mult)
    return int(float(s))
