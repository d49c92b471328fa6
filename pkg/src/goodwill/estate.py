"""Estate-level expected return over a distribution of stand ages.

An estate holds copies of one stand at different ages.  Its expected
capital return rate is the capital-weighted mean of the stands' momentary
rates, i.e. the ratio of density-weighted value growth to density-weighted
capitalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ValidationError
from .growth import Scenario, grid_index
from .ledger import CapitalizationSeries, rotation_integrals, trapezoid_K
from .returns import base_rate

MASS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Uniform:
    max_age: float

    def __post_init__(self):
        if not self.max_age > 0:
            raise ValidationError("must be > 0", field="max_age")


@dataclass(frozen=True)
class Discrete:
    weights: tuple

    def __post_init__(self):
        atoms = tuple((float(a), float(p)) for a, p in self.weights)
        object.__setattr__(self, "weights", atoms)
        if not atoms:
            raise ValidationError("no atoms", field="weights")
        for a, p in atoms:
            if not a >= 0:
                raise ValidationError(f"age {a!r} must be >= 0", field="age_years")
            if not p >= 0:
                raise ValidationError(f"mass {p!r} must be >= 0", field="mass")
        total = math.fsum(p for _, p in atoms)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValidationError(f"masses sum to {total!r}, not 1", field="mass")


AgeDistribution = Union[Uniform, Discrete]


@dataclass(frozen=True)
class Estate:
    scenario: Scenario
    distribution: AgeDistribution


def state_at(series: CapitalizationSeries, age: float):
    """``(kappa_rate, K)`` of a stand of the given age.

    Inside the rotation the values after any impulse at that age are used;
    at the rotation age itself, the standing stand before harvest and
    amortization.  Between grid nodes both are interpolated linearly within
    the smooth segment.
    """
    tau = series.tau
    if not 0 <= age <= tau + 1e-9 * max(1.0, tau):
        raise DomainError(f"age {age!r} is not covered by the rotation [0, {tau}]")
    h = series.grid_step
    n = len(series.ages) - 1
    x = min(age / h, n)
    i = min(int(math.floor(x)), n)
    frac = x - i
    if i == n:
        return float(series.kappa_rate_before[n]), float(series.K_before[n])
    if frac == 0.0:
        return float(series.kappa_rate[i]), float(series.K[i])
    k = (1 - frac) * series.K[i] + frac * series.K_before[i + 1]
    rate = (1 - frac) * series.kappa_rate[i] + frac * series.kappa_rate_before[i + 1]
    return float(rate), float(k)


def weighted_rate(states) -> float:
    """``sum p * kappa_rate / sum p * K`` over ``(p, kappa_rate, K)`` triples."""
    num = math.fsum(p * rate for p, rate, _ in states)
    den = math.fsum(p * k for p, _, k in states)
    if not den > 0:
        raise DomainError("weighted capitalization must be > 0")
    return num / den


def estate_rate(estate: Estate, series: CapitalizationSeries) -> float:
    """Expected capital return rate of the estate.

    For a discrete distribution this is ``sum p(a) kappa_rate(a) / sum p(a) K(a)``
    over momentary states.  A uniform distribution is integrated over the
    grid as measures, so point masses (the amortization at the rotation age)
    are included; over a full rotation this reproduces the base rate.
    """
    dist = estate.distribution
    if isinstance(dist, Discrete):
        return weighted_rate([(mass, *state_at(series, age))
                              for age, mass in dist.weights if mass > 0])

    if dist.max_age > series.tau + 1e-9 * max(1.0, series.tau):
        raise DomainError(f"max_age {dist.max_age} exceeds the rotation {series.tau}")
    m = grid_index(dist.max_age, series.grid_step, "max_age")
    d_kappa = math.fsum(series.kappa_increments[:m])
    impulses = math.fsum(e.amount for e in series.amortizations
                         if e.time <= dist.max_age + 1e-9)
    int_K = trapezoid_K(series, upto=m)
    if not int_K > 0:
        raise DomainError("integrated capitalization must be > 0")
    return (d_kappa - impulses) / int_K


def uniform_equivalence_check(estate: Estate, series: CapitalizationSeries) -> float:
    """Distance between the estate rate and the single-stand base rate."""
    return abs(estate_rate(estate, series) - base_rate(rotation_integrals(series)).rate)


def discretize_uniform(max_age: float, n: int) -> Discrete:
    """``n`` equal atoms at the cell midpoints of ``[0, max_age]``."""
    ages = (np.arange(n) + 0.5) * (max_age / n)
    return Discrete(tuple((float(a), 1.0 / n) for a in ages))
