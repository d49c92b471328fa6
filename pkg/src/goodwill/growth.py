"""Stand value trajectories.

A stand is described only by the value of its trees (currency/ha) as a
function of age.  Two growth models are provided: a closed-form
Chapman-Richards type curve and a tabulated curve read from inventory
projections.  Thinnings are impulses removing a fraction of standing value;
the remaining stand keeps growing at a reduced rate (see ``Scenario``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AlignmentError, FormatError, ValidationError

THINNING = "thinning"
FINAL_HARVEST = "final_harvest"


def _is_array(x):
    return isinstance(x, np.ndarray) and x.ndim > 0


@dataclass(frozen=True)
class Parametric:
    """Unthinned stand value ``v_max * (1 - exp(-k * (a - t0)))**m``.

    The value is zero up to the delay ``t0`` and saturates at ``v_max``.
    """

    v_max: float
    k: float
    m: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.v_max > 0:
            raise ValidationError("must be > 0", field="v_max")
        if not self.k > 0:
            raise ValidationError("must be > 0", field="k")
        if not self.m >= 1:
            raise ValidationError("must be >= 1", field="m")
        if not self.t0 >= 0:
            raise ValidationError("must be >= 0", field="t0")

    def value(self, age):
        x = np.maximum(np.asarray(age, dtype=float) - self.t0, 0.0)
        out = self.v_max * (-np.expm1(-self.k * x)) ** self.m
        return out if _is_array(out) else float(out)

    def derivative(self, age):
        x = np.asarray(age, dtype=float) - self.t0
        xp = np.maximum(x, 0.0)
        e = np.exp(-self.k * xp)
        base = -np.expm1(-self.k * xp)
        out = self.v_max * self.m * self.k * e * base ** (self.m - 1.0)
        out = np.where(x > 0, out, 0.0)
        return out if _is_array(out) else float(out)

    def scaled(self, factor):
        return Parametric(self.v_max * factor, self.k, self.m, self.t0)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear stand value through observed ``(age, value)`` rows.

    Outside the tabulated range the value is held constant, so the growth
    rate is zero there.
    """

    ages: tuple
    values: tuple

    def __post_init__(self):
        ages = tuple(float(a) for a in self.ages)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "ages", ages)
        object.__setattr__(self, "values", values)
        if len(ages) != len(values):
            raise ValidationError("ages and values differ in length", field="samples")
        if len(ages) < 2:
            raise FormatError("at least 2 samples required", field="samples")
        for i, v in enumerate(values):
            if not (v >= 0 and math.isfinite(v)):
                raise FormatError(f"negative or non-finite tree_value {v!r}", row=i,
                                  field="tree_value")
        for i in range(1, len(ages)):
            if not ages[i] > ages[i - 1]:
                raise FormatError("ages must be strictly increasing", row=i,
                                  field="age_years")
        slopes = np.diff(values) / np.diff(ages)
        object.__setattr__(self, "_slopes", slopes)

    @property
    def samples(self):
        return list(zip(self.ages, self.values))

    def value(self, age):
        out = np.interp(np.asarray(age, dtype=float), self.ages, self.values)
        return out if _is_array(out) else float(out)

    def derivative(self, age):
        # At an interior breakpoint the two one-sided slopes are averaged, so
        # trapezoidal sums over grids containing the breakpoints are exact.
        a = np.atleast_1d(np.asarray(age, dtype=float))
        xs = np.asarray(self.ages)
        s = self._slopes
        seg = np.clip(np.searchsorted(xs, a, side="right") - 1, 0, len(s) - 1)
        out = s[seg].copy()
        out[(a < xs[0]) | (a > xs[-1])] = 0.0
        out[a == xs[-1]] = s[-1]
        inner = np.isin(a, xs[1:-1])
        if inner.any():
            j = np.searchsorted(xs, a[inner])
            out[inner] = 0.5 * (s[j - 1] + s[j])
        return out if _is_array(age) else float(out[0])

    def scaled(self, factor):
        return Tabulated(self.ages, tuple(v * factor for v in self.values))


GrowthModel = Union[Parametric, Tabulated]


def load_tabulated(source) -> Tabulated:
    """Build a tabulated model from a trajectory table.

    ``source`` is a path, the table text itself, or a sequence of
    ``(age, value)`` pairs.  Text tables use the header
    ``age_years,tree_value``.
    """
    if isinstance(source, (list, tuple)):
        rows = []
        for i, pair in enumerate(source):
            try:
                a, v = pair
                rows.append((float(a), float(v)))
            except (TypeError, ValueError) as exc:
                raise FormatError(f"cannot read (age, value) pair: {exc}", row=i) from exc
    else:
        from .tables import read_trajectory_table
        rows = read_trajectory_table(source)
    if len(rows) < 2:
        raise FormatError(f"need at least 2 rows, got {len(rows)}", row=len(rows))
    return Tabulated(tuple(a for a, _ in rows), tuple(v for _, v in rows))


def growth_rate_at(model: GrowthModel, age: float, scar: float = 1.0) -> float:
    """Value growth rate at ``age`` of a stand whose growth is scaled by ``scar``."""
    if age < 0:
        raise ValidationError("age must be >= 0", field="age")
    if not 0 < scar <= 1:
        raise ValidationError("scar must be in (0, 1]", field="scar")
    return scar * model.derivative(age)


@dataclass(frozen=True)
class Scenario:
    """Economic setting of one stand.

    ``thinned_growth_share`` controls the response to thinning: removing a
    fraction ``q`` of standing value removes ``thinned_growth_share * q`` of
    the subsequent growth rate.  With 1.0 the remaining stand follows the
    unthinned curve scaled by ``1 - q``; smaller values model thinning from
    above, where the removed large trees carry less than their share of
    growth.
    """

    label: str
    bare_land_value: float
    regeneration_cost: float
    growth: GrowthModel
    goodwill_u: float = 0.5
    thinned_growth_share: float = 1.0

    def __post_init__(self):
        if not self.bare_land_value >= 0:
            raise ValidationError("must be >= 0", field="bare_land_value")
        if not self.regeneration_cost >= 0:
            raise ValidationError("must be >= 0", field="regeneration_cost")
        if not self.goodwill_u >= 0:
            raise ValidationError("must be >= 0", field="goodwill_u")
        if not 0 < self.thinned_growth_share <= 1:
            raise ValidationError("must be in (0, 1]", field="thinned_growth_share")

    def scaled(self, factor):
        """Same scenario with every currency amount multiplied by ``factor``."""
        return Scenario(self.label, self.bare_land_value * factor,
                        self.regeneration_cost * factor, self.growth.scaled(factor),
                        self.goodwill_u, self.thinned_growth_share)


@dataclass(frozen=True, order=True)
class ThinningEvent:
    time: float
    intensity: float
    kind: str = "from_above"

    def __post_init__(self):
        if not 0 < self.intensity < 1:
            raise ValidationError(f"intensity {self.intensity!r} outside (0, 1)",
                                  field="intensity")
        if not self.time > 0:
            raise ValidationError(f"thinning time {self.time!r} must be > 0", field="time")
        if self.kind != "from_above":
            raise ValidationError(f"unsupported thinning kind {self.kind!r}", field="kind")


@dataclass(frozen=True)
class ManagementPlan:
    rotation: float
    thinnings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "thinnings", tuple(self.thinnings))
        if not self.rotation > 0:
            raise ValidationError("must be > 0", field="rotation")
        prev = 0.0
        for t in self.thinnings:
            if not t.time > prev:
                raise ValidationError("thinning times must be strictly increasing",
                                      field="thinnings")
            prev = t.time
        if self.thinnings and not self.thinnings[-1].time < self.rotation:
            raise ValidationError("thinning times must precede the rotation age",
                                  field="thinnings")

    @property
    def n_thinnings(self):
        return len(self.thinnings)

    def describe(self):
        """Compact text form, e.g. ``30:0.25|45:0.2`` or ``none``."""
        if not self.thinnings:
            return "none"
        return "|".join(f"{t.time:.12g}:{t.intensity:.12g}" for t in self.thinnings)

    @classmethod
    def from_descriptor(cls, rotation, text):
        if text == "none":
            return cls(rotation)
        events = []
        for part in text.split("|"):
            time, _, q = part.partition(":")
            events.append(ThinningEvent(float(time), float(q)))
        return cls(rotation, tuple(events))


@dataclass(frozen=True)
class Impulse:
    time: float
    value_removed: float
    kind: str


@dataclass(frozen=True, eq=False)
class StandTrajectory:
    """Stand value sampled on a uniform age grid.

    ``tree_value`` holds the value after any thinning at a node (the standing
    stock at the rotation age is kept, a final harvest is only an impulse);
    ``value_before`` holds the value just before the node's impulse.
    ``growth_rate`` and ``growth_rate_before`` are the smooth value growth
    rates on either side of the node.
    """

    grid_step: float
    ages: np.ndarray
    tree_value: np.ndarray
    value_before: np.ndarray
    growth_rate: np.ndarray
    growth_rate_before: np.ndarray
    impulses: tuple = field(default_factory=tuple)

    @property
    def rotation(self):
        return float(self.ages[-1])

    def thinning_impulses(self):
        return [imp for imp in self.impulses if imp.kind == THINNING]

    def final_harvest(self):
        for imp in self.impulses:
            if imp.kind == FINAL_HARVEST:
                return imp
        return None


def grid_index(time: float, grid_step: float, what="time") -> int:
    """Node index of ``time`` on a grid of step ``grid_step``; rejects off-grid times."""
    n = round(time / grid_step)
    if abs(n * grid_step - time) > 1e-9 * max(1.0, abs(time)):
        raise AlignmentError(f"{what} {time!r} is not a multiple of grid step {grid_step!r}",
                             field=what)
    return int(n)


def simulate(scenario: Scenario, plan: ManagementPlan, grid_step: float = 0.25,
             final_harvest: bool = False) -> StandTrajectory:
    """Sample the stand value over ``[0, plan.rotation]``.

    Between impulses the value is ``scar * v(a) + offset`` where ``v`` is the
    unthinned curve; each thinning multiplies the standing value by
    ``1 - q`` and the growth rate by ``1 - share * q``.
    """
    if not grid_step > 0:
        raise ValidationError("must be > 0", field="grid_step")
    n = grid_index(plan.rotation, grid_step, "rotation")
    model = scenario.growth
    share = scenario.thinned_growth_share
    ages = np.arange(n + 1) * grid_step
    v = np.asarray(model.value(ages), dtype=float)
    dv = np.asarray(model.derivative(ages), dtype=float)

    tree_value = v.copy()
    value_before = v.copy()
    growth = dv.copy()
    growth_before = dv.copy()
    impulses = []
    scar, offset = 1.0, 0.0
    for event in plan.thinnings:
        i = grid_index(event.time, grid_step, "thinning time")
        before = scar * v[i] + offset
        removed = event.intensity * before
        after = (1.0 - event.intensity) * before
        scar = scar * (1.0 - share * event.intensity)
        offset = after - scar * v[i]
        value_before[i] = before
        tree_value[i:] = scar * v[i:] + offset
        tree_value[i] = after
        value_before[i + 1:] = tree_value[i + 1:]
        growth[i:] = scar * dv[i:]
        growth_before[i + 1:] = growth[i + 1:]
        impulses.append(Impulse(float(event.time), float(removed), THINNING))
    if final_harvest and tree_value[-1] > 0:
        impulses.append(Impulse(float(ages[-1]), float(tree_value[-1]), FINAL_HARVEST))
    for arr in (ages, tree_value, value_before, growth, growth_before):
        arr.setflags(write=False)
    return StandTrajectory(grid_step, ages, tree_value, value_before, growth, growth_before,
                           tuple(impulses))


def closed_form_value(scenario: Scenario, plan: ManagementPlan, age: float) -> float:
    """Stand value at one age evaluated directly from the growth model.

    Used as an independent check on ``simulate``; returns the value after
    any thinning at exactly ``age``.
    """
    model = scenario.growth
    share = scenario.thinned_growth_share
    value = model.value(age)
    last_t, last_v, scar = None, None, 1.0
    for event in plan.thinnings:
        if event.time > age:
            break
        standing = model.value(event.time) if last_t is None else (
            last_v + scar * (model.value(event.time) - model.value(last_t)))
        last_v = (1.0 - event.intensity) * standing
        last_t = event.time
        scar *= 1.0 - share * event.intensity
    if last_t is not None:
        value = last_v + scar * (model.value(age) - model.value(last_t))
    return float(value)

