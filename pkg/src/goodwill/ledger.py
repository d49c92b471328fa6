"""Balance-sheet capitalization and its decomposition into cash streams.

Sign conventions: ``N`` is timber revenue withdrawn by the owner, ``I`` is
cash invested (regeneration), ``A`` is amortization of capitalized
investment, and free cash flow is ``C = N - I``.  Capitalization changes as
``dK = dkappa - dN + dI`` with ``dkappa = dV - dA``.

Regeneration cost is capitalized at age 0 and amortized in full at the
rotation age.  Impulses are point masses: integrals add them exactly rather
than spreading them over grid cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .growth import FINAL_HARVEST, ManagementPlan, Scenario, StandTrajectory
from .tables import render_ledger

REGENERATION = "regeneration_investment"
THINNING_REVENUE = "thinning_revenue"
FINAL_HARVEST_REVENUE = "final_harvest_revenue"
AMORTIZATION = "amortization"


@dataclass(frozen=True)
class CashFlowEvent:
    time: float
    amount: float
    kind: str

    def __post_init__(self):
        if not self.amount > 0:
            raise ConsistencyError(f"cash flow amount must be > 0, got {self.amount!r}")


@dataclass(frozen=True, eq=False)
class CapitalizationSeries:
    """Capitalization ``K`` on the trajectory grid.

    ``K`` holds node values after the node's impulses and ``K_before`` the
    values just before them; at age 0 "before" means before the regeneration
    investment.  ``kappa_increments[i]`` is the smooth change of economic
    value over cell ``i`` (exact, from the sampled stand value);
    ``kappa_rate`` and ``kappa_rate_before`` are its rates on either side of
    each node.
    """

    ages: np.ndarray
    K: np.ndarray
    K_before: np.ndarray
    kappa_rate: np.ndarray
    kappa_rate_before: np.ndarray
    kappa_increments: np.ndarray
    investments: tuple
    withdrawals: tuple
    amortizations: tuple
    bare_land_value: float
    regeneration_cost: float
    standing_value: float
    initial_tree_value: float
    liquidated: bool

    @property
    def tau(self):
        return float(self.ages[-1])

    @property
    def grid_step(self):
        return float(self.ages[1] - self.ages[0])

    def ledger_entries(self):
        """``(time, stream, amount)`` rows ordered by time, then I, N, A."""
        order = {"I": 0, "N": 1, "A": 2}
        rows = [(e.time, "I", e.amount) for e in self.investments]
        rows += [(e.time, "N", e.amount) for e in self.withdrawals]
        rows += [(e.time, "A", e.amount) for e in self.amortizations]
        return sorted(rows, key=lambda r: (r[0], order[r[1]]))

    def export_ledger(self) -> str:
        return render_ledger(self.ledger_entries())


@dataclass(frozen=True)
class RotationIntegrals:
    int_kappa: float
    int_K: float
    int_N: float
    int_I: float
    int_A: float
    tau: float

    @property
    def int_C(self):
        return self.int_N - self.int_I


def build_series(trajectory: StandTrajectory, scenario: Scenario, plan: ManagementPlan,
                 liquidate_at_rotation: bool) -> CapitalizationSeries:
    """Capitalization and cash-flow ledger of one rotation."""
    if abs(trajectory.rotation - plan.rotation) > 1e-9 * max(1.0, plan.rotation):
        raise ConsistencyError(
            f"trajectory ends at {trajectory.rotation}, plan rotation is {plan.rotation}")
    thinned = trajectory.thinning_impulses()
    if len(thinned) != len(plan.thinnings) or any(
            abs(imp.time - ev.time) > 1e-9 * max(1.0, ev.time)
            for imp, ev in zip(thinned, plan.thinnings)):
        raise ConsistencyError("trajectory thinning impulses do not match the plan")
    final = trajectory.final_harvest()
    if final is not None and not liquidate_at_rotation:
        raise ConsistencyError("trajectory has a final harvest but liquidation is off")

    land = float(scenario.bare_land_value)
    regen = float(scenario.regeneration_cost)
    tau = trajectory.rotation
    ages = trajectory.ages
    V = trajectory.tree_value
    Vb = trajectory.value_before
    standing = float(V[-1])

    K = land + V + regen
    K_before = land + Vb + regen
    K_before[0] = land + Vb[0]
    K[-1] = land + (0.0 if liquidate_at_rotation else standing)
    kappa_increments = Vb[1:] - V[:-1]

    investments = (CashFlowEvent(0.0, regen, REGENERATION),) if regen > 0 else ()
    withdrawals = [CashFlowEvent(imp.time, imp.value_removed, THINNING_REVENUE)
                   for imp in thinned if imp.value_removed > 0]
    if liquidate_at_rotation and standing > 0:
        withdrawals.append(CashFlowEvent(tau, standing, FINAL_HARVEST_REVENUE))
    amortizations = (CashFlowEvent(tau, regen, AMORTIZATION),) if regen > 0 else ()

    for arr in (K, K_before, kappa_increments):
        arr.setflags(write=False)
    return CapitalizationSeries(
        ages=ages, K=K, K_before=K_before, kappa_rate=trajectory.growth_rate,
        kappa_rate_before=trajectory.growth_rate_before,
        kappa_increments=kappa_increments, investments=investments,
        withdrawals=tuple(withdrawals), amortizations=amortizations,
        bare_land_value=land, regeneration_cost=regen, standing_value=standing,
        initial_tree_value=float(Vb[0]), liquidated=bool(liquidate_at_rotation))


def _node_sums(events, ages, step):
    out = np.zeros(len(ages))
    for e in events:
        out[int(round(e.time / step))] += e.amount
    return out


def decompose_check(series: CapitalizationSeries) -> float:
    """Largest per-cell violation of ``dK = dkappa - dN + dI``.

    Cell ``i`` runs from just after node ``i`` to just after node ``i + 1``,
    so it carries the impulses at its right end; an extra leading cell holds
    the impulses at age 0.
    """
    ages = series.ages
    h = series.grid_step
    n_imp = _node_sums(series.withdrawals, ages, h)
    i_imp = _node_sums(series.investments, ages, h)
    a_imp = _node_sums(series.amortizations, ages, h)

    d_kappa = np.empty(len(ages))
    d_kappa[0] = 0.0
    d_kappa[1:] = series.kappa_increments
    d_kappa -= a_imp
    d_K = np.empty(len(ages))
    d_K[0] = series.K[0] - series.K_before[0]
    d_K[1:] = series.K[1:] - series.K[:-1]
    residual = np.abs(d_K - (d_kappa - n_imp + i_imp))
    return float(residual.max())


def trapezoid_K(series: CapitalizationSeries, upto: int = None) -> float:
    """Trapezoidal integral of ``K`` over the first ``upto`` cells.

    Each cell uses the one-sided values of its own smooth segment.
    """
    n = len(series.ages) - 1 if upto is None else upto
    h = series.grid_step
    left = series.K[:n]
    right = series.K_before[1:n + 1]
    return 0.5 * h * math.fsum(np.concatenate([left, right]))


def rotation_integrals(series: CapitalizationSeries) -> RotationIntegrals:
    int_A = math.fsum(e.amount for e in series.amortizations)
    int_kappa = math.fsum(series.kappa_increments) - int_A
    return RotationIntegrals(
        int_kappa=int_kappa,
        int_K=trapezoid_K(series),
        int_N=math.fsum(e.amount for e in series.withdrawals),
        int_I=math.fsum(e.amount for e in series.investments),
        int_A=int_A,
        tau=series.tau,
    )
