"""YAML experiment configuration with field-level diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import distributions
from .errors import ConfigError
from .ruin import RegularVariationSpec, RiskModel
from .subordinated import BaseCPP, SubordinatedCPP
from .subordinator import CompoundPoissonJumps, GammaJumps, Subordinator

__all__ = ["ExperimentConfig", "load_config", "parse_config", "parse_subordinator", "parse_distribution"]


@dataclass
class ExperimentConfig:
    model: RiskModel
    seed: int | None
    sections: dict[str, Any] = field(default_factory=dict)
    regular_variation: RegularVariationSpec | None = None
    workers: int = 1
    lines: dict[str, int] = field(default_factory=dict)

    def section(self, name: str) -> dict[str, Any]:
        sec = self.sections.get(name)
        if sec is None:
            raise ConfigError(name, "section is required for this command")
        if not isinstance(sec, dict):
            raise ConfigError(name, "must be a mapping", self.lines.get(name))
        return sec

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("seed", "a seed is mandatory for stochastic commands")
        return self.seed


class _Reader:
    def __init__(self, lines: dict[str, int]):
        self.lines = lines

    def fail(self, path: str, message: str):
        raise ConfigError(path, message, self.lines.get(path))

    def mapping(self, obj, path: str) -> dict:
        if not isinstance(obj, dict):
            self.fail(path, "must be a mapping")
        return obj

    def number(self, obj: dict, key: str, path: str, *, positive=False, nonneg=False, default=None) -> float:
        full = f"{path}.{key}" if path else key
        if key not in obj:
            if default is not None:
                return default
            self.fail(full, "missing required field")
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(full, f"must be a number, got {v!r}")
        v = float(v)
        if not math.isfinite(v):
            self.fail(full, "must be finite")
        if positive and not v > 0:
            self.fail(full, f"must be > 0, got {v}")
        if nonneg and not v >= 0:
            self.fail(full, f"must be >= 0, got {v}")
        return v

    def integer(self, obj: dict, key: str, path: str, *, minimum=0, default=None) -> int:
        full = f"{path}.{key}" if path else key
        if key not in obj:
            if default is not None:
                return default
            self.fail(full, "missing required field")
        v = obj[key]
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(full, f"must be an integer, got {v!r}")
        if v < minimum:
            self.fail(full, f"must be >= {minimum}, got {v}")
        return v

    def only(self, obj: dict, allowed, path: str):
        extra = sorted(set(obj) - set(allowed))
        if extra:
            self.fail(f"{path}.{extra[0]}" if path else extra[0], "unknown field")


def parse_distribution(obj, path: str, lines: dict[str, int] | None = None):
    r = _Reader(lines or {})
    obj = r.mapping(obj, path)
    kind = obj.get("kind")
    try:
        return distributions.from_record(obj)
    except (ValueError, TypeError) as exc:
        where = path if kind in ("exponential", "gamma", "deterministic", "pareto") else f"{path}.kind"
        r.fail(where, str(exc))


def parse_subordinator(obj, path: str, lines: dict[str, int] | None = None) -> Subordinator:
    r = _Reader(lines or {})
    obj = r.mapping(obj, path)
    r.only(obj, ("drift", "jumps"), path)
    drift = r.number(obj, "drift", path, nonneg=True, default=0.0)
    jumps = obj.get("jumps") or {"kind": "none"}
    jp = f"{path}.jumps"
    jumps = r.mapping(jumps, jp)
    kind = jumps.get("kind", "none")
    if kind == "none":
        r.only(jumps, ("kind",), jp)
        part = None
    elif kind == "compound_poisson":
        r.only(jumps, ("kind", "rate", "jump_law"), jp)
        if "jump_law" not in jumps:
            r.fail(f"{jp}.jump_law", "missing required field")
        part = CompoundPoissonJumps(
            r.number(jumps, "rate", jp, positive=True),
            parse_distribution(jumps["jump_law"], f"{jp}.jump_law", r.lines),
        )
    elif kind == "gamma":
        r.only(jumps, ("kind", "shape", "rate"), jp)
        part = GammaJumps(r.number(jumps, "shape", jp, positive=True), r.number(jumps, "rate", jp, positive=True))
    else:
        r.fail(f"{jp}.kind", f"unknown jump kind {kind!r}; expected none, compound_poisson or gamma")
    try:
        return Subordinator(drift, part)
    except ValueError as exc:
        r.fail(path, str(exc))


def _line_index(node, prefix: str, out: dict[str, int]) -> None:
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            out[path] = key_node.start_mark.line + 1
            _line_index(value_node, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            path = f"{prefix}[{i}]"
            out[path] = item.start_mark.line + 1
            _line_index(item, path, out)


def grid(obj, path: str, lines: dict[str, int] | None = None) -> np.ndarray:
    """A list of numbers or ``{start, stop, num}`` (inclusive, evenly spaced)."""
    r = _Reader(lines or {})
    if isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                r.fail(f"{path}[{i}]", f"must be a number, got {v!r}")
        return np.asarray(obj, dtype=float)
    obj = r.mapping(obj, path)
    r.only(obj, ("start", "stop", "num"), path)
    return np.linspace(r.number(obj, "start", path), r.number(obj, "stop", path), r.integer(obj, "num", path, minimum=1))


def parse_config(text: str) -> ExperimentConfig:
    try:
        root_node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ConfigError("<yaml>", str(exc.problem), None if mark is None else mark.line + 1) from None
    lines: dict[str, int] = {}
    if root_node is not None:
        _line_index(root_node, "", lines)
    r = _Reader(lines)
    data = r.mapping(data, "<root>")
    seed = None
    if "seed" in data:
        seed = r.integer(data, "seed", "", minimum=0)
    workers = r.integer(data, "workers", "", minimum=1, default=1)

    model = r.mapping(data.get("model"), "model")
    r.only(model, ("premium_rate", "capital", "claims"), "model")
    claims = r.mapping(model.get("claims"), "model.claims")
    r.only(claims, ("base", "subordinator"), "model.claims")
    base = r.mapping(claims.get("base"), "model.claims.base")
    r.only(base, ("rate", "claim_law"), "model.claims.base")
    if "claim_law" not in base:
        r.fail("model.claims.base.claim_law", "missing required field")
    base_cpp = BaseCPP(
        r.number(base, "rate", "model.claims.base", positive=True),
        parse_distribution(base["claim_law"], "model.claims.base.claim_law", lines),
    )
    sub_obj = claims.get("subordinator")
    sub = Subordinator.identity() if sub_obj is None else parse_subordinator(sub_obj, "model.claims.subordinator", lines)
    risk = RiskModel(
        r.number(model, "premium_rate", "model", positive=True),
        SubordinatedCPP(base_cpp, sub),
        r.number(model, "capital", "model", nonneg=True, default=0.0),
    )

    rv = None
    if "regular_variation" in data:
        rvo = r.mapping(data["regular_variation"], "regular_variation")
        r.only(rvo, ("index", "constant"), "regular_variation")
        index = r.number(rvo, "index", "regular_variation")
        if not index > 1:
            r.fail("regular_variation.index", f"must be > 1, got {index}")
        rv = RegularVariationSpec(index, r.number(rvo, "constant", "regular_variation", positive=True))

    known = {"seed", "workers", "model", "regular_variation", "adjustment", "zhist", "ruin", "sweep", "trajectory"}
    r.only(data, known, "")
    sections = {k: data[k] for k in ("adjustment", "zhist", "ruin", "sweep", "trajectory") if k in data}
    return ExperimentConfig(risk, seed, sections, rv, workers, lines)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
