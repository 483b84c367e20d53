"""Key=value configuration files mirroring the command-line flags.

Format: one ``key = value`` pair per line, ``#`` comments, blank lines
ignored. Keys are the dotted command path followed by the flag name with
dashes turned into underscores (``eval.folds``, ``mission.run.window_s``).
Values stay strings until a consumer casts them; command-line flags always
win over config values.
"""

from __future__ import annotations


def parse_config(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected key = value")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ValueError(f"config line {line_no}: empty key")
        out[key] = value.strip()
    return out


def load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _cast(value: str, kind):
    if kind is bool:
        lowered = value.lower()
        if lowered not in _BOOL_VALUES:
            raise ValueError(f"expected a boolean, got {value!r}")
        return _BOOL_VALUES[lowered]
    return kind(value)


def resolve(config: dict[str, str], key: str, flag_value, default, kind=str):
    """Effective setting: the flag if given, else the config entry, else the
    default. Config values are cast to the default's kind."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return _cast(config[key], kind)
    return default
