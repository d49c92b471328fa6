"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is
printed in the terminal summary."""

import math
import time

import numpy as np
import pytest

from goodwill.cli import main
from goodwill.estate import Estate, Uniform, uniform_equivalence_check, weighted_rate
from goodwill.growth import ManagementPlan
from goodwill.ledger import RotationIntegrals, decompose_check, rotation_integrals
from goodwill.returns import (
    base_rate, periodicity_residual, premium_closure_residual, re_rate,
    re_rate_no_harvest, ts_rate,
)
from goodwill.scenarios import default_scenarios
from goodwill.strategy import (
    RE, TS, compare_strategies, extend_rotation, optimize_rotation, parallel_map, run_plan,
    sweep_rotation,
)

from conftest import plans_for

RESULTS = {}
SHIPPED = default_scenarios()


def record(number, title, ok, detail=""):
    RESULTS[number] = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}" + (
        f" ({detail})" if detail else "")
    assert ok, RESULTS[number]


@pytest.fixture(scope="module")
def comparisons():
    start = time.perf_counter()
    comps = parallel_map(lambda sc: compare_strategies(sc, 0.5), SHIPPED)
    return comps, time.perf_counter() - start


def test_criterion_01_scaling_identity():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        kappa, K = rng.normal(500, 800), rng.uniform(1e2, 1e6)
        ri = RotationIntegrals(kappa, K, *rng.uniform(0, 1e3, 3), rng.uniform(1, 120))
        u = rng.uniform(0, 2)
        b = base_rate(ri).rate
        worst = max(worst, abs(ts_rate(ri, u).rate * (1 + u) - b) / abs(b))
        assert ts_rate(ri, 0.5).rate == b / 1.5
    elapsed = time.perf_counter() - start
    record(1, "ts_rate*(1+u) = base_rate", worst <= 1e-12 and elapsed < 1,
           f"max rel err {worst:.1e}, {elapsed:.2f} s")


def test_criterion_02_reduction_identity():
    start = time.perf_counter()
    worst = 0.0
    for sc in SHIPPED:
        ri = rotation_integrals(run_plan(sc, ManagementPlan(50.0), RE))
        u = sc.goodwill_u
        nh = re_rate_no_harvest(ri, u).rate
        worst = max(worst, abs(re_rate(ri, u).rate - nh) / nh,
                    abs((nh - base_rate(ri).rate) - u / (1 + u) * ri.int_A / ri.int_K) / nh)
    elapsed = time.perf_counter() - start
    record(2, "re_rate = re_rate_no_harvest without harvest", worst <= 1e-12 and elapsed < 1,
           f"max rel err {worst:.1e}, {elapsed:.2f} s")


def test_criterion_03_ledger_decomposition():
    start = time.perf_counter()
    worst = 0.0
    for sc in SHIPPED:
        for plan in plans_for():
            for strategy in (TS, RE):
                s = run_plan(sc, plan, strategy)
                worst = max(worst, decompose_check(s) / s.K.max())
    elapsed = time.perf_counter() - start
    record(3, "dK = dkappa - dN + dI", worst <= 1e-9 and elapsed < 5,
           f"max residual/max K {worst:.1e}, {elapsed:.2f} s")


def test_criterion_04_periodicity_cash_identity_premium_closure():
    start = time.perf_counter()
    ok = True
    worst = 0.0
    for sc in SHIPPED:
        for plan in plans_for():
            s = run_plan(sc, plan, TS)
            ri = rotation_integrals(s)
            scale = ri.int_K / ri.tau
            checks = (periodicity_residual(s) / s.K[0],
                      abs(ri.int_kappa - ri.int_C) / scale,
                      premium_closure_residual(ri, sc.goodwill_u) / scale)
            worst = max(worst, *checks)
            ok &= all(c <= 1e-9 for c in checks)
    elapsed = time.perf_counter() - start
    record(4, "periodicity, cash identity, premium closure", ok and elapsed < 5,
           f"max scaled residual {worst:.1e}, {elapsed:.2f} s")


def test_criterion_05_integration_oracle():
    start = time.perf_counter()
    worst = 0.0
    for sc in SHIPPED:
        for plan in plans_for():
            for strategy in (TS, RE):
                coarse = base_rate(rotation_integrals(run_plan(sc, plan, strategy, 0.25))).rate
                fine = base_rate(rotation_integrals(run_plan(sc, plan, strategy, 0.025))).rate
                worst = max(worst, abs(coarse - fine) / abs(fine))
    elapsed = time.perf_counter() - start
    record(5, "base_rate at h=0.25 vs h=0.025", worst <= 1e-4 and elapsed < 30,
           f"max rel diff {worst:.1e}, {elapsed:.2f} s")


def test_criterion_06_dominance_band(comparisons):
    comps, elapsed = comparisons
    ratios = [c.ratio for c in comps]
    ok = (all(1.3 <= r <= 1.7 for r in ratios)
          and all(c.re.rotation <= c.ts.rotation for c in comps)
          and all(c.re.plan.n_thinnings == 0 for c in comps)
          and all(c.re.rate > c.ts.rate for c in comps))
    record(6, "RE*/TS* in [1.3, 1.7], shorter unthinned RE rotation", ok and elapsed < 120,
           f"ratios {min(ratios):.3f}..{max(ratios):.3f}, {elapsed:.1f} s")


def test_criterion_07_ts_thinning_entry(comparisons):
    comps, _ = comparisons
    thinned = sum(c.ts.plan.n_thinnings >= 1 for c in comps)
    record(7, "TS optima thin on >= 8 of 9 scenarios", thinned >= 8, f"{thinned}/9")


def test_criterion_08_ts_argmax_u_invariance(comparisons):
    comps, _ = comparisons
    same = 0
    for sc, c in zip(SHIPPED, comps):
        picks = [optimize_rotation(sweep_rotation(sc, TS, u)).plan for u in (0.0, 1.0)]
        same += all(p == c.ts.plan for p in picks)
    record(8, "TS optimum identical for u in {0, 0.5, 1}", same == len(SHIPPED),
           f"{same}/{len(SHIPPED)}")


def test_criterion_09_rotation_extension(comparisons):
    comps, _ = comparisons
    start = time.perf_counter()
    ok = 0
    for sc, c in zip(SHIPPED, comps):
        ext = extend_rotation(sc, 0.5, 20.0, curve=c.re_curve)
        ok += (ext.extended.rotation >= ext.baseline.rotation + 20
               and ext.unthinned.rate <= ext.extended.rate <= ext.baseline.rate)
    elapsed = time.perf_counter() - start
    record(9, "extended RE: unthinned <= thinned <= unconstrained",
           ok == len(SHIPPED) and elapsed < 120, f"{ok}/{len(SHIPPED)}, {elapsed:.2f} s")


def test_criterion_10_estate_equivalence():
    worst = 0.0
    for sc in SHIPPED:
        for plan in plans_for():
            for strategy in (TS, RE):
                series = run_plan(sc, plan, strategy)
                worst = max(worst, uniform_equivalence_check(
                    Estate(sc, Uniform(plan.rotation)), series))
    two_atoms = weighted_rate([(0.5, 4.0, 100.0), (0.5, 18.0, 300.0)])
    record(10, "uniform estate rate = base rate; two-atom example",
           worst <= 1e-9 and two_atoms == 0.055,
           f"max residual {worst:.1e}, two-atom {two_atoms!r}")


def test_criterion_11_determinism(tmp_path, monkeypatch):
    runs = []
    for i, threads in enumerate(("1", "8", "8")):
        monkeypatch.setenv("GOODWILL_THREADS", threads)
        out = tmp_path / f"run{i}"
        assert main(["compare", "--out", str(out)]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    record(11, "compare outputs byte-identical across reruns and thread counts",
           len(runs[0]) == 19 and runs[0] == runs[1] == runs[2], f"{len(runs[0])} files")
