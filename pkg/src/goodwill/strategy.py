"""Strategy evaluation, rotation sweeps and thinning-schedule search.

Searches are exhaustive over a ``SearchGrid``.  Candidate schedules are
ranked with a vectorized evaluator that reproduces the trapezoidal
integrals of the ledger in closed form; every winning plan is then
re-evaluated through ``simulate`` / ``build_series`` / the rate functions,
and only those re-evaluated rates are reported.

Ties are broken toward the shortest rotation, then the fewest thinnings,
then the earliest first thinning (candidate enumeration order).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional

import numpy as np

from .errors import ValidationError
from .growth import ManagementPlan, Scenario, ThinningEvent, grid_index, simulate
from .ledger import CapitalizationSeries, RotationIntegrals, build_series, rotation_integrals
from .returns import RE, TS, GoodwillParams, re_rate, ts_rate
from .tables import render_curve

DEFAULT_GRID_STEP = 0.25
DEFAULT_INTENSITIES = (0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40)
_CHUNK = 20000


def normalize_strategy(strategy: str) -> str:
    s = str(strategy).upper()
    if s not in (TS, RE):
        raise ValidationError(f"unknown strategy {strategy!r}", field="strategy")
    return s


def worker_count(default: int = None) -> int:
    """Parallelism cap from ``GOODWILL_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get("GOODWILL_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValidationError(f"not an integer: {raw!r}", field="GOODWILL_THREADS") from None
        if n < 1:
            raise ValidationError("must be >= 1", field="GOODWILL_THREADS")
        return n
    return default or min(8, os.cpu_count() or 1)


def parallel_map(fn, items, workers=None):
    """Ordered map over ``items``; results do not depend on ``workers``."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class SearchGrid:
    rotation_min: float = 10.0
    rotation_max: float = 120.0
    rotation_step: float = 1.0
    thinning_time_step: float = 5.0
    intensity_levels: tuple = DEFAULT_INTENSITIES
    max_thinnings: int = 2

    def __post_init__(self):
        object.__setattr__(self, "intensity_levels",
                           tuple(float(q) for q in self.intensity_levels))
        if not self.rotation_min > 0:
            raise ValidationError("must be > 0", field="rotation_min")
        if not self.rotation_min < self.rotation_max:
            raise ValidationError("rotation_min must be < rotation_max", field="rotation_max")
        if not self.rotation_step > 0:
            raise ValidationError("must be > 0", field="rotation_step")
        if not self.thinning_time_step > 0:
            raise ValidationError("must be > 0", field="thinning_time_step")
        if any(not 0 < q < 1 for q in self.intensity_levels):
            raise ValidationError("levels must lie in (0, 1)", field="intensity_levels")
        if len(set(self.intensity_levels)) != len(self.intensity_levels):
            raise ValidationError("levels must be distinct", field="intensity_levels")
        if not (isinstance(self.max_thinnings, int) and 0 <= self.max_thinnings <= 3):
            raise ValidationError("must be an integer in 0..3", field="max_thinnings")
        if self.max_thinnings > 0 and not self.intensity_levels:
            raise ValidationError("no intensity levels for thinnings", field="intensity_levels")

    def rotations(self):
        n = int(math.floor((self.rotation_max - self.rotation_min) / self.rotation_step
                           + 1e-9))
        return [self.rotation_min + i * self.rotation_step for i in range(n + 1)]

    def thinning_times(self, below):
        n = int(math.ceil(below / self.thinning_time_step - 1e-9))
        return [i * self.thinning_time_step for i in range(1, n)]


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    u: float
    plan: ManagementPlan
    rate: float
    integrals: RotationIntegrals

    @property
    def rotation(self):
        return self.plan.rotation


@dataclass(frozen=True)
class RotationCurve:
    strategy: str
    u: float
    samples: tuple
    label: str = ""

    def __post_init__(self):
        rots = [s.rotation for s in self.samples]
        if any(b <= a for a, b in zip(rots, rots[1:])):
            raise ValidationError("rotations must be strictly increasing", field="samples")

    @property
    def rotations(self):
        return [s.rotation for s in self.samples]

    @property
    def rates(self):
        return [s.rate for s in self.samples]

    def rows(self):
        return [(s.rotation, s.rate, s.plan.n_thinnings, s.plan.describe())
                for s in self.samples]

    def export(self) -> str:
        return render_curve(self.rows())


def run_plan(scenario: Scenario, plan: ManagementPlan, strategy: str,
             grid_step: float = DEFAULT_GRID_STEP) -> CapitalizationSeries:
    """Simulate a plan and build its ledger the way ``strategy`` executes it.

    Timber sales liquidate the standing stock at the rotation age; the
    real-estate strategy exits through an estate sale and books no final
    harvest.
    """
    liquidate = normalize_strategy(strategy) == TS
    traj = simulate(scenario, plan, grid_step, final_harvest=liquidate)
    return build_series(traj, scenario, plan, liquidate)


def evaluate(scenario: Scenario, plan: ManagementPlan, strategy: str,
             u: Optional[float] = None, grid_step: float = DEFAULT_GRID_STEP) -> StrategyResult:
    strategy = normalize_strategy(strategy)
    g = GoodwillParams(scenario.goodwill_u if u is None else u)
    ri = rotation_integrals(run_plan(scenario, plan, strategy, grid_step))
    rate = (ts_rate if strategy == TS else re_rate)(ri, g).rate
    return StrategyResult(strategy, g.u, plan, rate, ri)


class CandidateSearch:
    """Ranks every thinning schedule of a grid at every grid rotation.

    Stand value after the last thinning of a schedule is ``g * v(a) + c``,
    so its capitalization integral up to any later rotation follows from the
    cumulative trapezoid of the unthinned curve.
    """

    def __init__(self, scenario: Scenario, grid: SearchGrid,
                 grid_step: float = DEFAULT_GRID_STEP):
        self.scenario = scenario
        self.grid = grid
        self.h = grid_step
        rotations = grid.rotations()
        self.rotations = rotations
        self.rot_idx = np.array([grid_index(r, grid_step, "rotation") for r in rotations])
        n_max = int(self.rot_idx.max())
        ages = np.arange(n_max + 1) * grid_step
        self.v = np.asarray(scenario.growth.value(ages), dtype=float)
        cells = 0.5 * grid_step * (self.v[1:] + self.v[:-1])
        self.W = np.concatenate([[0.0], np.cumsum(cells)])
        self.times = grid.thinning_times(max(rotations))
        for t in self.times:
            grid_index(t, grid_step, "thinning time")

    def _schedules(self, count):
        levels = self.grid.intensity_levels
        time_sets = list(combinations(range(len(self.times)), count))
        q_sets = list(product(range(len(levels)), repeat=count))
        if count == 0:
            return np.zeros((1, 0)), np.zeros((1, 0))
        if not time_sets:
            return np.zeros((0, count)), np.zeros((0, count))
        ti = np.repeat(np.array(time_sets, int), len(q_sets), axis=0)
        qi = np.tile(np.array(q_sets, int), (len(time_sets), 1))
        T = np.array(self.times)[ti]
        Q = np.array(levels)[qi]
        return T, Q

    def _state(self, T, Q):
        h, v, W = self.h, self.v, self.W
        share = self.scenario.thinned_growth_share
        S = T.shape[0]
        g = np.ones(S)
        c = np.zeros(S)
        revenue = np.zeros(S)
        int_trees = np.zeros(S)
        prev = np.zeros(S, int)
        for j in range(T.shape[1]):
            p = np.rint(T[:, j] / h).astype(int)
            int_trees += g * (W[p] - W[prev]) + c * (p - prev) * h
            before = g * v[p] + c
            q = Q[:, j]
            revenue += q * before
            after = (1.0 - q) * before
            g = g * (1.0 - share * q)
            c = after - g * v[p]
            prev = p
        return g, c, revenue, int_trees, prev

    def best(self, strategy: str, u: float):
        """Best schedule index per rotation as ``[(rotation, thinnings), ...]``."""
        strategy = normalize_strategy(strategy)
        land = self.scenario.bare_land_value
        regen = self.scenario.regeneration_cost
        r = self.rot_idx
        rot_years = r * self.h
        best_key = np.full(len(r), -np.inf)
        best_plan = [() for _ in r]
        for count in range(self.grid.max_thinnings + 1):
            T, Q = self._schedules(count)
            g, c, revenue, int_trees, prev = self._state(T, Q)
            for lo in range(0, T.shape[0], _CHUNK):
                sl = slice(lo, lo + _CHUNK)
                gg, cc, pp = g[sl, None], c[sl, None], prev[sl, None]
                V = gg * self.v[r] + cc
                int_K = (int_trees[sl, None] + gg * (self.W[r] - self.W[pp])
                         + cc * (r - pp) * self.h + (land + regen) * rot_years)
                int_kappa = V - self.v[0] + revenue[sl, None] - regen
                if strategy == TS:
                    # TS ranks by the base rate, so the choice is u-invariant.
                    key = int_kappa / int_K
                else:
                    key = (((1.0 + u) * int_kappa - u * (revenue[sl, None] - regen))
                           / ((1.0 + u) * int_K))
                key = np.where(pp < r, key, -np.inf)
                idx = np.argmax(key, axis=0)
                top = key[idx, np.arange(len(r))]
                better = top > best_key
                for j in np.flatnonzero(better):
                    k = lo + idx[j]
                    best_plan[j] = tuple(ThinningEvent(float(t), float(q))
                                         for t, q in zip(T[k], Q[k]))
                best_key = np.where(better, top, best_key)
        return list(zip(self.rotations, best_plan))


def sweep_rotation(scenario: Scenario, strategy: str, u: Optional[float] = None,
                   grid: SearchGrid = SearchGrid(),
                   grid_step: float = DEFAULT_GRID_STEP) -> RotationCurve:
    """Best plan and its rate at every rotation of ``grid``."""
    strategy = normalize_strategy(strategy)
    u = GoodwillParams(scenario.goodwill_u if u is None else u).u
    if not grid.rotations():
        raise ValidationError("grid has no rotations", field="grid")
    search = CandidateSearch(scenario, grid, grid_step)
    samples = tuple(
        evaluate(scenario, ManagementPlan(rot, thin), strategy, u, grid_step)
        for rot, thin in search.best(strategy, u))
    return RotationCurve(strategy, u, samples, scenario.label)


def optimize_rotation(curve: RotationCurve) -> StrategyResult:
    """Sample with the highest rate; the earliest rotation wins ties."""
    if not curve.samples:
        raise ValidationError("curve has no samples", field="curve")
    return curve.samples[int(np.argmax(np.array(curve.rates)))]


@dataclass(frozen=True)
class Extension:
    """Outcome of lengthening the real-estate rotation by ``delta`` years."""

    baseline: StrategyResult
    extended: StrategyResult
    unthinned: StrategyResult
    delta: float
    curve: RotationCurve = field(repr=False, default=None)
    constrained: RotationCurve = field(repr=False, default=None)

    @property
    def rate_loss(self):
        return self.baseline.rate - self.extended.rate

    def __iter__(self):
        return iter((self.baseline, self.extended))


def extend_rotation(scenario: Scenario, u: Optional[float] = None, delta: float = 20.0,
                    grid: SearchGrid = SearchGrid(), grid_step: float = DEFAULT_GRID_STEP,
                    curve: RotationCurve = None) -> Extension:
    """Best real-estate plan whose rotation is at least ``delta`` years longer
    than the unconstrained optimum; thinnings are allowed to get there."""
    if not delta >= 0:
        raise ValidationError("must be >= 0", field="delta")
    if curve is None:
        curve = sweep_rotation(scenario, RE, u, grid, grid_step)
    baseline = optimize_rotation(curve)
    floor = baseline.rotation + delta - 1e-9
    allowed = tuple(s for s in curve.samples if s.rotation >= floor)
    if not allowed:
        raise ValidationError(
            f"grid ends at {curve.rotations[-1]}, cannot reach rotation "
            f"{baseline.rotation + delta}", field="delta")
    extended = optimize_rotation(RotationCurve(RE, curve.u, allowed, curve.label))
    unthinned = evaluate(scenario, ManagementPlan(extended.rotation), RE, curve.u, grid_step)
    return Extension(baseline, extended, unthinned, float(delta), curve,
                     RotationCurve(RE, curve.u, allowed, curve.label))


@dataclass(frozen=True)
class Comparison:
    label: str
    u: float
    ts: StrategyResult
    re: StrategyResult
    ts_curve: RotationCurve = field(repr=False)
    re_curve: RotationCurve = field(repr=False)

    @property
    def ratio(self):
        return self.re.rate / self.ts.rate

    @property
    def rotation_difference(self):
        return self.ts.rotation - self.re.rotation

    def summary_row(self):
        return (self.label, self.u, self.ts.rotation, self.ts.rate, self.re.rotation,
                self.re.rate, self.ratio)


def compare_strategies(scenario: Scenario, u: Optional[float] = None,
                       grid: SearchGrid = SearchGrid(),
                       grid_step: float = DEFAULT_GRID_STEP) -> Comparison:
    u = GoodwillParams(scenario.goodwill_u if u is None else u).u
    ts_curve = sweep_rotation(scenario, TS, u, grid, grid_step)
    re_curve = sweep_rotation(scenario, RE, u, grid, grid_step)
    return Comparison(scenario.label, u, optimize_rotation(ts_curve),
                      optimize_rotation(re_curve), ts_curve, re_curve)
