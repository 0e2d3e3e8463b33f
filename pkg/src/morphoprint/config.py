"""Strict JSON <-> dataclass plumbing for configuration documents.

Every config type in the package loads through `from_mapping`, which rejects
unknown keys and reports problems with a full field path (e.g.
``params.repulsion_radius: must be > 0``) so CLI errors are actionable.
"""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any, Mapping, Type, TypeVar

from .errors import ConfigError

T = TypeVar("T")

_NUMERIC = (int, float)


def from_mapping(cls: Type[T], data: Mapping[str, Any], path: str = "") -> T:
    """Build a dataclass instance from a mapping, rejecting unknown keys."""
    if not isinstance(data, Mapping):
        raise ConfigError(path or cls.__name__.lower(), "expected a JSON object")
    prefix = path or cls.__name__.lower()
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{prefix}.{key}", "unknown key")
    kwargs: dict[str, Any] = {}
    for name, value in data.items():
        field = fields[name]
        kwargs[name] = _coerce(field, value, f"{prefix}.{name}")
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(prefix, str(exc)) from exc


def _coerce(field: dataclasses.Field, value: Any, path: str) -> Any:
    ftype = field.type if isinstance(field.type, str) else getattr(field.type, "__name__", "")
    if "float" in str(ftype):
        if isinstance(value, bool) or not isinstance(value, _NUMERIC):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if str(ftype) == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    return value


def load_json(path: str | Path) -> Any:
    """Parse a JSON file, wrapping syntax errors as ConfigError."""
    p = Path(path)
    try:
        with open(p, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(str(p), "file not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(p), f"invalid JSON: {exc}") from exc


def dump_json(obj: Any, path: str | Path) -> None:
    """Write JSON with a stable layout (sorted keys, trailing newline)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def require(condition: bool, path: str, message: str) -> None:
    """Raise ConfigError(path, message) unless condition holds."""
    if not condition:
        raise ConfigError(path, message)
