"""Shipped calibration scenarios.

Nine synthetic stands: three growth families (pine-, spruce- and
birch-like curve shapes) at three initial densities.  They are stand-ins
chosen to exercise the optimizer over realistic ranges (optimal rotations
of roughly 35-60 years, returns of a few percent per year); they are not
fitted to any inventory data.
"""

from __future__ import annotations

from .growth import Parametric, Scenario

THINNING_GROWTH_SHARE = 0.4

# family -> (bare land, regeneration cost, {density: (v_max, k, m, t0)})
_FAMILIES = {
    "pine_like": (800.0, 600.0, {
        "sparse": (13000.0, 0.032, 4.0, 6.0),
        "medium": (15000.0, 0.035, 4.0, 5.0),
        "dense": (16500.0, 0.038, 4.0, 4.0),
    }),
    "spruce_like": (900.0, 900.0, {
        "sparse": (18000.0, 0.033, 5.0, 7.0),
        "medium": (20000.0, 0.036, 5.0, 6.0),
        "dense": (22000.0, 0.039, 5.0, 5.0),
    }),
    "birch_like": (700.0, 500.0, {
        "sparse": (10000.0, 0.034, 3.0, 10.0),
        "medium": (12000.0, 0.036, 3.0, 8.0),
        "dense": (13000.0, 0.038, 3.0, 6.0),
    }),
}


def default_scenarios(u: float = 0.5):
    out = []
    for family, (land, regen, settings) in _FAMILIES.items():
        for density, (v_max, k, m, t0) in settings.items():
            out.append(Scenario(
                label=f"{family}_{density}",
                bare_land_value=land,
                regeneration_cost=regen,
                growth=Parametric(v_max, k, m, t0),
                goodwill_u=u,
                thinned_growth_share=THINNING_GROWTH_SHARE,
            ))
    return out


def default_scenario(label: str = "pine_like_medium", u: float = 0.5) -> Scenario:
    for sc in default_scenarios(u):
        if sc.label == label:
            return sc
    raise KeyError(label)
