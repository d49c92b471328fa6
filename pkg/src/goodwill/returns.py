"""Capital return rates with and without a goodwill premium.

The market prices an estate at ``(1 + u) * K``.  Under the timber-sales
strategy the premium is never realized and the rate is scaled down by
``1 + u``.  Under the real-estate strategy the stand is sold on the estate
market at maturity, realizing the premium on value growth that has not
been cashed out through harvesting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, PreconditionError, ValidationError
from .ledger import CapitalizationSeries, RotationIntegrals

NONE = "none"
TS = "TS"
RE = "RE"

DEFAULT_U = 0.5


@dataclass(frozen=True)
class GoodwillParams:
    u: float = DEFAULT_U

    def __post_init__(self):
        if not self.u >= 0:
            raise ValidationError(f"goodwill u must be >= 0, got {self.u!r}", field="u")


@dataclass(frozen=True)
class ReturnValue:
    rate: float
    strategy: str
    integrals: Optional[RotationIntegrals] = None


def momentary_rate(kappa_rate: float, K: float) -> float:
    if not K > 0:
        raise DomainError(f"capitalization must be > 0, got {K!r}")
    return kappa_rate / K


def _check(ri: RotationIntegrals):
    if not ri.int_K > 0:
        raise DomainError(f"integrated capitalization must be > 0, got {ri.int_K!r}")


def _u(g) -> float:
    return g.u if isinstance(g, GoodwillParams) else GoodwillParams(g).u


def base_rate(ri: RotationIntegrals) -> ReturnValue:
    """Expected rate over one rotation with uniform age density."""
    _check(ri)
    return ReturnValue(ri.int_kappa / ri.int_K, NONE, ri)


def ts_rate(ri: RotationIntegrals, g=GoodwillParams()) -> ReturnValue:
    """Timber-sales rate: the base rate divided by ``1 + u``."""
    _check(ri)
    u = _u(g)
    return ReturnValue((ri.int_kappa / ri.int_K) / (1.0 + u), TS, ri)


def re_rate(ri: RotationIntegrals, g=GoodwillParams()) -> ReturnValue:
    """Real-estate rate integrated from establishment to the estate sale.

    Cash taken out before the sale (``int_N``) forfeits its premium; the
    amortized investment keeps it.
    """
    _check(ri)
    u = _u(g)
    num = (1.0 + u) * ri.int_kappa - u * (ri.int_N - ri.int_A)
    return ReturnValue(num / ((1.0 + u) * ri.int_K), RE, ri)


def re_rate_no_harvest(ri: RotationIntegrals, g=GoodwillParams()) -> ReturnValue:
    """Real-estate rate when nothing is harvested before the sale."""
    _check(ri)
    if ri.int_N != 0:
        raise PreconditionError(
            f"no-harvest form requires zero net cash flow before sale, int_N={ri.int_N!r}")
    u = _u(g)
    return ReturnValue((ri.int_kappa + (u / (1.0 + u)) * ri.int_A) / ri.int_K, RE, ri)


def periodicity_residual(series: CapitalizationSeries) -> float:
    """How far capitalization after the rotation's impulses, plus the next
    regeneration investment, is from the starting capitalization."""
    end = float(series.K[-1]) + series.regeneration_cost
    return abs(end - float(series.K[0]))


def premium_closure_residual(ri: RotationIntegrals, g=GoodwillParams(),
                             exited_via_estate_market: bool = False) -> float:
    """Premium accumulated on value growth not realized as free cash flow.

    Without an estate sale this must close to zero; with one it is the
    premium realized at the sale.
    """
    premium = _u(g) * (ri.int_kappa - ri.int_C)
    return premium if exited_via_estate_market else abs(premium)
