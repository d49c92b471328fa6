"""JSON run configuration.

Example::

    {
      "schema": "goodwill-run/1",
      "scenarios": "default",
      "plan": {"rotation": 50, "thinnings": [{"time": 30, "intensity": 0.25}]},
      "strategy": "both",
      "u": 0.5,
      "grid": {"rotation_min": 10, "rotation_max": 120, "max_thinnings": 2},
      "grid_step": 0.25,
      "delta": 20,
      "distribution": {"kind": "uniform", "max_age": 50},
      "out": "results"
    }

``scenarios`` is ``"default"`` (the nine shipped stands) or a list whose
items are inline scenario objects or ``{"file": "path.json"}`` references.
Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ValidationError
from .estate import Discrete, Uniform
from .growth import ManagementPlan, Parametric, Scenario, ThinningEvent, load_tabulated
from .scenarios import default_scenarios
from .strategy import DEFAULT_GRID_STEP, SearchGrid
from .tables import read_distribution

SCHEMA = "goodwill-run/1"
DEFAULT_PLAN = ManagementPlan(50.0)
_LABEL = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass
class RunConfig:
    scenarios: list = field(default_factory=default_scenarios)
    plan: ManagementPlan = DEFAULT_PLAN
    strategy: str = "both"
    u: Optional[float] = None
    grid: SearchGrid = field(default_factory=SearchGrid)
    grid_step: float = DEFAULT_GRID_STEP
    delta: float = 20.0
    distribution: object = None
    out: Path = Path("goodwill_out")

    @property
    def strategies(self):
        return {"both": ["TS", "RE"], "ts": ["TS"], "re": ["RE"]}[self.strategy]


def _fail(path, message):
    raise ValidationError(message, field=path)


def _take(obj, path, allowed):
    if not isinstance(obj, dict):
        _fail(path, "must be an object")
    extra = sorted(set(obj) - set(allowed))
    if extra:
        _fail(f"{path}.{extra[0]}" if path else extra[0], "unknown field")
    return obj


def _num(obj, key, path, default=None, required=False):
    if key not in obj:
        if required:
            _fail(f"{path}.{key}" if path else key, "missing required field")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"{path}.{key}" if path else key, f"must be a number, got {value!r}")
    return float(value)


def _wrap(path, fn, *args, **kwargs):
    """Call a constructor, prefixing validation errors with the config path."""
    try:
        return fn(*args, **kwargs)
    except ValidationError as exc:
        sub = f"{path}.{exc.field}" if exc.field else path
        msg = str(exc)
        if exc.field and msg.startswith(f"{exc.field}: "):
            msg = msg[len(exc.field) + 2:]
        raise ValidationError(msg, field=sub) from exc


def _growth(obj, path, base):
    _take(obj, path, {"kind", "v_max", "k", "m", "t0", "file", "samples"})
    kind = obj.get("kind")
    if kind == "parametric":
        args = [_num(obj, key, path, required=True) for key in ("v_max", "k", "m")]
        return _wrap(path, Parametric, *args, _num(obj, "t0", path, 0.0))
    if kind == "tabulated":
        if "file" in obj:
            ref = base / obj["file"]
            if not ref.is_file():
                _fail(f"{path}.file", f"file not found: {ref}")
            return _wrap(f"{path}.file", load_tabulated, ref)
        if "samples" in obj:
            return _wrap(f"{path}.samples", load_tabulated, list(obj["samples"]))
        _fail(path, "tabulated growth needs 'file' or 'samples'")
    _fail(f"{path}.kind", f"must be 'parametric' or 'tabulated', got {kind!r}")


def parse_scenario(obj, path="scenario", base=Path(".")) -> Scenario:
    _take(obj, path, {"label", "bare_land_value", "regeneration_cost", "growth",
                      "goodwill_u", "thinned_growth_share"})
    label = obj.get("label")
    if not isinstance(label, str) or not _LABEL.match(label):
        _fail(f"{path}.label", f"must be a non-empty name of [A-Za-z0-9_.-], got {label!r}")
    if "growth" not in obj:
        _fail(f"{path}.growth", "missing required field")
    growth = _growth(obj["growth"], f"{path}.growth", base)
    return _wrap(path, Scenario, label,
                 _num(obj, "bare_land_value", path, required=True),
                 _num(obj, "regeneration_cost", path, required=True),
                 growth,
                 _num(obj, "goodwill_u", path, 0.5),
                 _num(obj, "thinned_growth_share", path, 1.0))


def _scenarios(value, base):
    if value == "default":
        return default_scenarios()
    if not isinstance(value, list) or not value:
        _fail("scenarios", "must be \"default\" or a non-empty list")
    out = []
    for i, item in enumerate(value):
        path = f"scenarios[{i}]"
        if isinstance(item, dict) and set(item) == {"file"}:
            ref = base / item["file"]
            if not ref.is_file():
                _fail(f"{path}.file", f"file not found: {ref}")
            try:
                item = json.loads(ref.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                _fail(f"{path}.file", f"invalid JSON: {exc}")
            out.append(parse_scenario(item, path, ref.parent))
        else:
            out.append(parse_scenario(item, path, base))
    labels = [s.label for s in out]
    if len(set(labels)) != len(labels):
        _fail("scenarios", "labels must be unique")
    return out


def _plan(obj):
    _take(obj, "plan", {"rotation", "thinnings"})
    rotation = _num(obj, "rotation", "plan", required=True)
    events = []
    for i, t in enumerate(obj.get("thinnings", [])):
        path = f"plan.thinnings[{i}]"
        _take(t, path, {"time", "intensity"})
        events.append(_wrap(path, ThinningEvent, _num(t, "time", path, required=True),
                            _num(t, "intensity", path, required=True)))
    return _wrap("plan", ManagementPlan, rotation, tuple(events))


def _grid(obj):
    _take(obj, "grid", {"rotation_min", "rotation_max", "rotation_step", "thinning_time_step",
                        "intensity_levels", "max_thinnings"})
    kwargs = {}
    for key in ("rotation_min", "rotation_max", "rotation_step", "thinning_time_step"):
        if key in obj:
            kwargs[key] = _num(obj, key, "grid")
    if "intensity_levels" in obj:
        levels = obj["intensity_levels"]
        if not isinstance(levels, list):
            _fail("grid.intensity_levels", "must be a list")
        kwargs["intensity_levels"] = tuple(
            _num({"level": q}, "level", f"grid.intensity_levels[{i}]")
            for i, q in enumerate(levels))
    if "max_thinnings" in obj:
        n = obj["max_thinnings"]
        if isinstance(n, bool) or not isinstance(n, int):
            _fail("grid.max_thinnings", "must be an integer")
        kwargs["max_thinnings"] = n
    return _wrap("grid", SearchGrid, **kwargs)


def _distribution(obj, base):
    _take(obj, "distribution", {"kind", "max_age", "file", "atoms"})
    kind = obj.get("kind")
    if kind == "uniform":
        return _wrap("distribution", Uniform, _num(obj, "max_age", "distribution",
                                                   required=True))
    if kind == "discrete":
        if "file" in obj:
            ref = base / obj["file"]
            if not ref.is_file():
                _fail("distribution.file", f"file not found: {ref}")
            atoms = _wrap("distribution.file", read_distribution, ref)
        else:
            atoms = obj.get("atoms")
            if not isinstance(atoms, list):
                _fail("distribution.atoms", "must be a list of [age, mass] pairs")
        return _wrap("distribution", Discrete, tuple(tuple(a) for a in atoms))
    _fail("distribution.kind", f"must be 'uniform' or 'discrete', got {kind!r}")


def parse_config(data: dict, base=Path(".")) -> RunConfig:
    _take(data, "", {"schema", "scenarios", "plan", "strategy", "u", "grid", "grid_step",
                     "delta", "distribution", "out"})
    if data.get("schema") != SCHEMA:
        _fail("schema", f"expected {SCHEMA!r}, got {data.get('schema')!r}")
    cfg = RunConfig()
    if "scenarios" in data:
        cfg.scenarios = _scenarios(data["scenarios"], base)
    if "plan" in data:
        cfg.plan = _plan(data["plan"])
    if "strategy" in data:
        cfg.strategy = str(data["strategy"]).lower()
    cfg.u = _num(data, "u", "", None)
    if "grid" in data:
        cfg.grid = _grid(data["grid"])
    cfg.grid_step = _num(data, "grid_step", "", DEFAULT_GRID_STEP)
    cfg.delta = _num(data, "delta", "", 20.0)
    if "distribution" in data:
        cfg.distribution = _distribution(data["distribution"], base)
    if "out" in data:
        cfg.out = base / str(data["out"])
    return validate(cfg)


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.strategy not in ("both", "ts", "re"):
        _fail("strategy", f"must be ts, re or both, got {cfg.strategy!r}")
    if cfg.u is not None and not cfg.u >= 0:
        _fail("u", f"must be >= 0, got {cfg.u!r}")
    if not cfg.grid_step > 0:
        _fail("grid_step", "must be > 0")
    if not cfg.delta >= 0:
        _fail("delta", "must be >= 0")
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        _fail("config", f"file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _fail("config", f"invalid JSON: {exc}")
    return parse_config(data, path.parent)
