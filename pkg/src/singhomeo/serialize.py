"""Versioned JSON envelopes for expressions, PL functions and Cantor schemes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .cantor import CantorScheme
from .errors import ConfigError
from .homeo import HomeoExpr
from .interval_fn import PLFunc
from .rational import fmt

FORMAT = "singhomeo"
VERSION = 1


def to_envelope(obj) -> dict:
    if isinstance(obj, HomeoExpr):
        kind, data = "homeo", obj.to_json()
    elif isinstance(obj, PLFunc):
        kind, data = "pl", {"points": obj.to_json(), "monotone": bool(obj.monotone_homeo)}
    elif isinstance(obj, CantorScheme):
        kind, data = "cantor", {"u": fmt(obj.u), "v": fmt(obj.v)}
    else:
        raise ConfigError(f"cannot serialize {type(obj).__name__}")
    return {"format": FORMAT, "version": VERSION, "kind": kind, "data": data}


def from_envelope(env) -> HomeoExpr | PLFunc | CantorScheme:
    if not isinstance(env, dict) or env.get("format") != FORMAT:
        raise ConfigError("not a singhomeo object file")
    if env.get("version") != VERSION:
        raise ConfigError(f"unsupported object version {env.get('version')!r}")
    kind, data = env.get("kind"), env.get("data")
    try:
        if kind == "homeo":
            return HomeoExpr.from_json(data)
        if kind == "pl":
            return PLFunc.from_json(data["points"], bool(data.get("monotone", False)))
        if kind == "cantor":
            return CantorScheme(data["u"], data["v"])
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed {kind} object: {exc}") from exc
    raise ConfigError(f"unknown object kind {kind!r}")


def canonical(payload) -> str:
    """Stable text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def dumps(obj) -> str:
    return canonical(to_envelope(obj))


def loads(text: str):
    try:
        env = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return from_envelope(env)


def atomic_write(path: str | Path, text: str) -> Path:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_object(path: str | Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path} is not UTF-8 text") from exc
    return loads(text)


def write_object(obj, path: str | Path) -> Path:
    return atomic_write(path, dumps(obj))
