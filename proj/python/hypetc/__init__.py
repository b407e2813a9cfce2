"""Python interface to the hypetc solver and simulator."""

from __future__ import annotations

import json
from typing import Any, Iterable

from . import _hypetc
from ._hypetc import HypetcError, dwell_time

HypetcError.code = property(lambda self: self.args[0] if self.args else None)

__all__ = [
    "HypetcError",
    "compare",
    "constants",
    "default_config",
    "dwell_time",
    "simulate",
    "solve_kernels",
    "warnings",
]


def _text(config: dict[str, Any] | None) -> str:
    return json.dumps(config if config is not None else {})


def default_config() -> dict[str, Any]:
    """Reference canal configuration."""
    return json.loads(_hypetc.default_config_json())


def _with(config: dict[str, Any] | None, **sections: dict[str, Any]) -> dict[str, Any]:
    full = json.loads(_hypetc.normalize_config_json(_text(config)))
    for key, value in sections.items():
        full[key] = value if not isinstance(value, dict) else {**full.get(key, {}), **value}
    return full


def constants(config: dict[str, Any] | None = None) -> dict[str, Any]:
    """Design constants (kernels, gains, trigger and self-triggering constants)."""
    return json.loads(_hypetc.constants_json(_text(config)))


def warnings(config: dict[str, Any] | None = None) -> list[str]:
    return list(_hypetc.warnings(_text(config)))


def simulate(config: dict[str, Any] | None = None, mode: str | None = None,
             out_dir: str | None = "") -> dict[str, Any]:
    """Runs one scenario. By default nothing is written; pass out_dir to keep the files."""
    cfg = _with(config)
    if mode is not None:
        cfg["mode"] = mode
    if out_dir is not None:
        cfg["output"]["dir"] = out_dir
    return _hypetc.simulate(json.dumps(cfg))


def compare(config: dict[str, Any] | None = None,
            modes: Iterable[str] = ("open_loop", "ctc", "cetc", "petc", "stc")) -> list[dict[str, Any]]:
    """Runs the same setup under several modes, sharing one kernel solve."""
    base = _with(config)
    base["output"]["dir"] = ""
    texts = []
    for m in modes:
        base["mode"] = m
        texts.append(json.dumps(base))
    return _hypetc.compare(texts)


def solve_kernels(family: str, config: dict[str, Any] | None = None) -> dict[str, Any]:
    """Kernel family 'K', 'P', 'L' or 'R' as dense arrays (NaN above the diagonal)."""
    return _hypetc.solve_kernels(family, _text(config))
