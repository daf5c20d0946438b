"""Flat ``section.key = value`` experiment configs.

One assignment per line; ``#`` starts a comment.  Values are JSON
literals (numbers, ``true``/``false``, ``null``, quoted strings, lists);
a bare word without spaces is read as a string.  Unknown keys, repeated
keys and malformed lines are errors.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

KINDS = ("phase2p", "cg_pd", "er_dynamics", "wealth_pd", "toc_sweep", "custom")
DYNAMIC_KINDS = ("cg_pd", "er_dynamics", "wealth_pd", "custom")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class UnknownKind(ConfigError):
    pass


@dataclass(frozen=True)
class Field:
    type: str  # int, float, bool, str, floats
    default: Any = None
    choices: tuple | None = None
    doc: str = ""


def _f(type_, default=None, choices=None, doc=""):
    return Field(type_, default, choices, doc)


SCHEMA: dict[str, Field] = {
    "experiment.kind": _f("str", None, KINDS, "what to run"),
    "experiment.seed": _f("int", 0, doc="master seed; replicate r draws from (seed, r, stream)"),
    "experiment.replicates": _f("int", 1),
    "experiment.require_convergence": _f("bool", True, doc="exit 6 when a dynamics run hits max_steps"),
    "graph.kind": _f("str", "complete", ("complete", "erdos_renyi", "file")),
    "graph.n": _f("int", 20),
    "graph.mean_degree": _f("float", None),
    "graph.file": _f("str", None, doc="edge list in the export format"),
    "game.kind": _f("str", "pd", ("pd", "wealth")),
    "game.c": _f("float", 1.0, doc="cooperation cost"),
    "wealth.kind": _f("str", "none", ("none", "uniform", "explicit")),
    "wealth.low": _f("float", 0.0),
    "wealth.high": _f("float", 3.0),
    "wealth.values": _f("floats", None),
    "init.kind": _f("str", "uniform", ("constant", "uniform", "single_seed", "explicit")),
    "init.value": _f("float", 0.0),
    "init.low": _f("float", 0.25),
    "init.high": _f("float", 0.75),
    "init.node": _f("int", 0),
    "init.values": _f("floats", None),
    "dynamics.lam": _f("float", 0.01),
    "dynamics.q_max": _f("float", 1 - 1e-6),
    "dynamics.max_steps": _f("int", 20000),
    "dynamics.tol": _f("float", 1e-8),
    "dynamics.window": _f("int", 10),
    "dynamics.mode": _f("str", "generalized", ("generalized", "selective")),
    "dynamics.rule": _f("str", "ascent", ("ascent", "mixed")),
    "phase.q2": _f("float", 0.4),
    "phase.q1_points": _f("int", 100),
    "phase.c_points": _f("int", 100),
    "phase.boundary": _f("float", 0.01, doc="distance to a threshold curve counted as boundary"),
    "phase.simulate": _f("bool", True),
    "toc.n": _f("int", 100),
    "toc.n_c": _f("int", 30),
    "toc.q_low": _f("float", 0.0),
    "toc.q_high": _f("float", 0.9),
    "toc.q_points": _f("int", 91),
    "toc.form": _f("str", "printed", ("printed", "exact")),
    "toc.resource": _f("str", "linear", ("linear", "power")),
    "toc.S0": _f("float", 1.0),
    "toc.alpha": _f("float", 2.0),
    "toc.numeric": _f("bool", False, doc="also solve each point by best responses on the explicit graph"),
    "output.trajectory": _f("bool", True),
    "output.stride": _f("int", 1, doc="record every stride-th step (the last step is always kept)"),
    "sweep.key": _f("str", None),
    "sweep.values": _f("floats", None),
    "manifest.version": _f("str", None, doc="written by the tool; ignored on input"),
}

_COMMON = ("experiment", "output", "sweep", "manifest")
SECTIONS = {
    "phase2p": _COMMON + ("phase", "dynamics"),
    "cg_pd": _COMMON + ("graph", "game", "init", "dynamics"),
    "er_dynamics": _COMMON + ("graph", "game", "init", "dynamics"),
    "wealth_pd": _COMMON + ("graph", "game", "wealth", "init", "dynamics"),
    "custom": _COMMON + ("graph", "game", "wealth", "init", "dynamics"),
    "toc_sweep": _COMMON + ("toc",),
}

_LINE = re.compile(r"^([a-z_][a-z0-9_]*\.[a-zA-Z0-9_]+)\s*=\s*(.*?)\s*$")
_BARE = re.compile(r"^[A-Za-z_./-][\w./+-]*$")


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        if _BARE.match(text):
            return text
        raise


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse config text into a flat ``{dotted_key: value}`` dict (no schema check)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value', got {raw!r}")
        key, val = m.groups()
        if key in out:
            raise ConfigError(f"{source}:{lineno}: {key} assigned twice")
        try:
            out[key] = parse_value(val)
        except json.JSONDecodeError:
            raise ConfigError(f"{source}:{lineno}: cannot read value {val!r} for {key}") from None
    return out


def _coerce(key: str, value, field: Field):
    if value is None:
        return None
    t = field.type
    ok = True
    if t == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif t == "float":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif t == "bool":
        ok = isinstance(value, bool)
    elif t == "str":
        ok = isinstance(value, str)
    elif t == "floats":
        ok = isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
        value = [float(v) for v in value] if ok else value
    if not ok:
        raise ConfigError(f"{key} must be of type {t}, got {value!r}")
    if field.choices is not None and value not in field.choices:
        raise ConfigError(f"{key} must be one of {', '.join(field.choices)}, got {value!r}")
    return value


def resolve(raw: dict) -> dict:
    """Check keys against the schema and fill in defaults for every section the kind uses."""
    unknown = sorted(k for k in raw if k not in SCHEMA)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    kind = raw.get("experiment.kind")
    if kind is None:
        raise ConfigError("experiment.kind is required")
    if kind not in KINDS:
        raise UnknownKind(f"unknown experiment kind {kind!r}; expected one of {', '.join(KINDS)}")
    allowed = SECTIONS[kind]
    stray = sorted(k for k in raw if k.split(".")[0] not in allowed)
    if stray:
        raise ConfigError(f"key(s) not used by {kind}: {', '.join(stray)}")
    cfg = {}
    for key, field in SCHEMA.items():
        section = key.split(".")[0]
        if section not in allowed or section in ("sweep", "manifest"):
            continue
        cfg[key] = _coerce(key, raw.get(key, field.default), field)
    if "sweep.key" in raw or "sweep.values" in raw:
        for key in ("sweep.key", "sweep.values"):
            if key not in raw:
                raise ConfigError(f"sweep needs both sweep.key and sweep.values; {key} is missing")
            cfg[key] = _coerce(key, raw[key], SCHEMA[key])
    check(cfg)
    return cfg


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def check(cfg: dict) -> None:
    """Cross-field validation beyond types and choices."""
    kind = cfg["experiment.kind"]
    _require(cfg["experiment.seed"] >= 0, "experiment.seed must be >= 0")
    _require(cfg["experiment.replicates"] >= 1, "experiment.replicates must be >= 1")
    _require(cfg["output.stride"] >= 1, "output.stride must be >= 1")
    if "dynamics.lam" in cfg:
        _require(0 < cfg["dynamics.lam"] <= 1, "dynamics.lam must lie in (0, 1]")
        _require(0 < cfg["dynamics.q_max"] < 1, "dynamics.q_max must lie in (0, 1)")
        _require(cfg["dynamics.max_steps"] >= 0, "dynamics.max_steps must be >= 0")
        _require(cfg["dynamics.tol"] > 0, "dynamics.tol must be positive")
        _require(cfg["dynamics.window"] >= 1, "dynamics.window must be >= 1")
    if kind == "phase2p":
        _require(0 <= cfg["phase.q2"] < 1, "phase.q2 must lie in [0, 1)")
        _require(cfg["phase.q1_points"] >= 1 and cfg["phase.c_points"] >= 1, "phase grid needs >= 1 point per axis")
        _require(cfg["phase.boundary"] >= 0, "phase.boundary must be >= 0")
    if kind in DYNAMIC_KINDS:
        gk = cfg["graph.kind"]
        if gk == "file":
            _require(cfg["graph.file"] is not None, "graph.kind = file needs graph.file (or --graph-file)")
        else:
            _require(cfg["graph.file"] is None, "graph.file is only used with graph.kind = file")
            _require(cfg["graph.n"] >= 2, "graph.n must be >= 2")
        if gk == "erdos_renyi":
            md = cfg["graph.mean_degree"]
            _require(md is not None and 0 < md < cfg["graph.n"], "erdos_renyi needs 0 < graph.mean_degree < graph.n")
        if kind == "er_dynamics":
            _require(gk in ("erdos_renyi", "file"), "er_dynamics runs on erdos_renyi graphs (or a graph file)")
        if kind in ("cg_pd", "wealth_pd"):
            _require(gk == "complete", f"{kind} runs on the complete graph")
        if kind == "cg_pd":
            _require(cfg["game.kind"] == "pd", "cg_pd plays the prisoners' dilemma")
        _require(cfg["game.c"] > 0, "game.c must be positive")
        wk = cfg.get("wealth.kind", "none")
        if wk == "uniform":
            _require(cfg["wealth.low"] <= cfg["wealth.high"], "wealth.low must not exceed wealth.high")
        if wk == "explicit":
            _require(cfg["wealth.values"] is not None, "wealth.kind = explicit needs wealth.values")
        if cfg["game.kind"] == "wealth":
            _require(wk != "none", "game.kind = wealth needs a wealth distribution")
        ik = cfg["init.kind"]
        if ik == "uniform":
            _require(0 <= cfg["init.low"] <= cfg["init.high"] <= 1, "need 0 <= init.low <= init.high <= 1")
        if ik in ("constant", "single_seed"):
            _require(0 <= cfg["init.value"] <= 1, "init.value must lie in [0, 1]")
        if ik == "explicit":
            _require(cfg["init.values"] is not None, "init.kind = explicit needs init.values")
    if kind == "toc_sweep":
        _require(1 <= cfg["toc.n_c"] <= cfg["toc.n"] - 1, "need 1 <= toc.n_c <= toc.n - 1")
        _require(0 <= cfg["toc.q_low"] <= cfg["toc.q_high"] < 1, "need 0 <= toc.q_low <= toc.q_high < 1")
        _require(cfg["toc.q_points"] >= 1, "toc.q_points must be >= 1")
        _require(cfg["toc.S0"] > 0, "toc.S0 must be positive")
    if "sweep.key" in cfg:
        key = cfg["sweep.key"]
        _require(key in cfg and SCHEMA[key].type in ("int", "float"), f"sweep.key {key!r} is not a numeric key of {kind}")
        _require(len(cfg["sweep.values"]) >= 1, "sweep.values is empty")
        _require(key not in ("experiment.seed", "experiment.replicates"), f"cannot sweep {key}")
        if SCHEMA[key].type == "int":
            _require(all(v == int(v) for v in cfg["sweep.values"]), f"{key} takes integer values")


def with_value(cfg: dict, key: str, value) -> dict:
    """Copy of ``cfg`` with one key replaced and re-validated."""
    out = dict(cfg)
    out[key] = int(value) if SCHEMA[key].type == "int" else float(value)
    out.pop("sweep.key", None)
    out.pop("sweep.values", None)
    check(out)
    return out


def format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(repr(float(v)) for v in value) + "]"
    return json.dumps(value)


def format_config(cfg: dict, header: str = "") -> str:
    lines = [f"# {line}" for line in header.splitlines()]
    lines += [f"{key} = {format_value(cfg[key])}" for key in sorted(cfg)]
    return "\n".join(lines) + "\n"


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, str(path))


def schema_help() -> str:
    """Human-readable key listing for ``--help``."""
    rows = []
    for key, f in SCHEMA.items():
        extra = f" ({'|'.join(f.choices)})" if f.choices else ""
        rows.append(f"  {key:<30} {f.type:<6} default {format_value(f.default)}{extra}")
    return "\n".join(rows)
