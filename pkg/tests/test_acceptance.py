"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line; the lines are echoed in the pytest
terminal summary under "acceptance criteria".
"""

from __future__ import annotations

import json
import math
import random
import time
from fractions import Fraction

import pytest

from hyperfptas import hardcore, twospin
from hyperfptas.cli import _slope, bench_rows, main
from hyperfptas.hardcore import HardcoreParams, HardcoreRecursion, lambda_critical
from hyperfptas.instances import edge_cover_reduction, gen_random, serialize
from hyperfptas.oracle import exact_hardcore, exact_ratio
from hyperfptas.twospin import SpinParams, SpinRecursion, beta_critical, edge_decay_ceiling, edge_decay_term

from acceptance_log import report
from corpus import hardcore_corpus, spin_corpus
from identities import hardcore_identity_sides, spin_identity_sides


def _compare_all(tmp_path, capsys, corpus, tag, delta_flag):
    worst = 0.0
    failures = []
    for k, (G, spec, delta) in enumerate(corpus):
        path = tmp_path / f"{tag}{k}.hg"
        path.write_text(serialize(G, spec))
        argv = ["compare", "--input", str(path), "--epsilon", "0.05"]
        if delta_flag:
            argv += ["--delta", str(delta)]
        code = main(argv)
        res = json.loads(capsys.readouterr().out)
        worst = max(worst, res["abs_log_error"])
        if code != 0 or not res["pass"]:
            failures.append(k)
    return worst, failures


def test_criterion_1_hardcore_accuracy(tmp_path, capsys):
    t0 = time.perf_counter()
    corpus = hardcore_corpus()
    assert len(corpus) == 50
    assert all(G.n <= 12 and delta <= 4 and float(spec.lam) < lambda_critical(delta) for G, spec, delta in corpus)
    worst, failures = _compare_all(tmp_path, capsys, corpus, "hc", False)
    secs = time.perf_counter() - t0
    ok = not failures and secs < 60
    report(1, "hardcore accuracy eps=0.05", ok,
           f"50 instances, worst |log error| {worst:.3g}, failures {failures}, {secs:.1f}s")
    assert ok


def test_criterion_2_spin_accuracy(tmp_path, capsys):
    t0 = time.perf_counter()
    corpus = spin_corpus()
    assert len(corpus) == 50
    assert all(G.n <= 9 and G.max_degree <= 3 for G, _, _ in corpus)
    worst, failures = _compare_all(tmp_path, capsys, corpus, "sp", True)
    secs = time.perf_counter() - t0
    ok = not failures and secs < 120
    report(2, "spin accuracy eps=0.05", ok,
           f"50 instances, worst |log error| {worst:.3g}, failures {failures}, {secs:.1f}s")
    assert ok


def _identity_instances(model, count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(3, 7)
        m = rng.randint(1, n)
        try:
            G, _ = gen_random(n, m, 3, 3, rng.randrange(2**32), model, (0.3, 1.0))
        except Exception:
            continue
        live = [v for v in range(G.n) if G.degree(v)]
        out.append((G, rng.choice(live), rng.choice(["0.3", "1", "2.5"])))
    return out


def test_criterion_3_recursion_identities():
    worst_hc = max(abs(a - b) for a, b in (hardcore_identity_sides(G, v, lam)
                                          for G, v, lam in _identity_instances("hardcore", 100, 31)))
    worst_sp = max(abs(a - b) for a, b in (spin_identity_sides(G, v, lam)
                                          for G, v, lam in _identity_instances("spin", 100, 32)))
    ok = worst_hc <= 1e-9 and worst_sp <= 1e-9
    report(3, "recursion identities", ok,
           f"100+100 instances, max abs error hardcore {worst_hc:.3g}, spin {worst_sp:.3g}")
    assert ok


def _envelope_violations(corpus, model):
    # exact ratios are floats rounded from rationals, hence the few-ulp slack
    violations = checked = 0
    for G, spec, delta in corpus:
        if model == "hardcore":
            plan = hardcore.plan_constants(HardcoreParams(spec.lam_f, delta))
            rec = HardcoreRecursion(plan, memo=True)
        else:
            plan = twospin.plan_constants(SpinParams(spec.lam_f, delta))
            rec = SpinRecursion(plan, memo=True)
        for v in range(G.n):
            exact = float(exact_ratio(G, v, model, spec.lam))
            for L in range(31):
                checked += 1
                if abs(rec.ratio(G, v, L) - exact) > plan.bigC * plan.alpha**L + 4 * math.ulp(exact):
                    violations += 1
    return violations, checked


@pytest.mark.slow
def test_criterion_4_decay_envelopes():
    vh, ch = _envelope_violations(hardcore_corpus(), "hardcore")
    vs, cs = _envelope_violations(spin_corpus(), "spin")
    ok = vh == 0 and vs == 0
    report(4, "decay envelopes L=0..30", ok,
           f"hardcore {vh}/{ch} violations, spin {vs}/{cs} violations")
    assert ok


def test_criterion_5_rate_bounds():
    rng = random.Random(2024)
    samples = 100_000

    hc_settings = [(0.3, 3), (0.8, 4), (1.0, 4), (1.5, 3), (1.0, 5)]
    hc_plans = [(HardcoreParams(lam, d), hardcore.plan_constants(HardcoreParams(lam, d))) for lam, d in hc_settings]
    hc_excess = -math.inf
    for k in range(samples):
        p, plan = hc_plans[k % len(hc_plans)]
        arities = [rng.randint(1, 12) for _ in range(rng.randint(1, p.delta - 1))]
        x = [rng.uniform(0, p.lam) for _ in range(sum(arities))]
        hc_excess = max(hc_excess, hardcore.amortized_decay_rate(x, arities, p, plan.c) - plan.alpha)

    sp_plans = [twospin.plan_constants(SpinParams(lam, 3)) for lam in (0.3, 0.5, 0.9)]
    sp_excess = -math.inf
    for k in range(samples):
        plan = sp_plans[k % len(sp_plans)]
        lo, hi = plan.ratio_range
        edges = []
        for _ in range(rng.randint(1, 2)):
            w = rng.randint(1, 12)
            edges.append((rng.uniform(plan.beta_c, 1), rng.uniform(plan.beta_c, 1),
                          [rng.uniform(lo, hi) for _ in range(w)], [rng.uniform(lo, hi) for _ in range(w - 1)]))
        sp_excess = max(sp_excess, twospin.amortized_decay_rate(edges, plan) - plan.alpha)

    w_excess = -math.inf
    for k in range(samples):
        plan = sp_plans[k % len(sp_plans)]
        d = plan.delta_margin
        w = rng.randint(1, 200)
        x, y, z = (rng.uniform(d, 1 - d) for _ in range(3))
        term = w**plan.c * edge_decay_term(w, x, y, z, plan.beta_c)
        w_excess = max(w_excess, term - edge_decay_ceiling(plan))

    ok = hc_excess <= 1e-9 and sp_excess <= 1e-9 and w_excess <= 1e-9
    report(5, "rate bounds, 3 x 1e5 samples", ok,
           f"max excess over bound: hardcore {hc_excess:.3g}, spin {sp_excess:.3g}, edge term {w_excess:.3g}")
    assert ok


def test_criterion_6_thresholds():
    lc5 = lambda_critical(5)
    bc3 = beta_critical(3)
    ok = abs(lc5 - 256 / 243) <= 1e-12 * (256 / 243) and lambda_critical(2) == math.inf and abs(bc3 - 0.698758) <= 1e-6
    report(6, "thresholds", ok,
           f"lambda_c(5)={lc5!r}, lambda_c(2)={lambda_critical(2)}, beta_c(3)={bc3:.7f}")
    assert ok


def test_criterion_7_edge_cover():
    details, ok = [], True
    for name, adj, want in (("K3", [[1, 2], [0, 2], [0, 1]], 4), ("P3", [[1], [0, 2], [1]], 1)):
        G, _ = edge_cover_reduction(adj)
        exact = exact_hardcore(G, 1).z
        est = hardcore.partition_function(G, HardcoreParams(1.0, max(2, G.max_degree)), 0.01)
        err = abs(est.log_z - math.log(want))
        ok = ok and exact == Fraction(want) and err <= 0.01
        details.append(f"{name} Z={exact} |log error| {err:.3g}")
    report(7, "edge-cover special case", ok, ", ".join(details))
    assert ok


def test_criterion_8_scaling():
    sizes = [8, 16, 32, 64]
    rows = bench_rows("hardcore", sizes, 3, 0.1, 0.3, 7)
    slope = _slope(sizes, [r["nodes"] for r in rows])
    ok = slope is not None and slope < 4
    report(8, "scaling sanity", ok,
           f"nodes {[r['nodes'] for r in rows]} at n={sizes}, log-log slope {slope:.3f}")
    assert ok


@pytest.mark.slow
def test_criterion_9_determinism(tmp_path, capsys):
    mismatches = []
    total = 0
    for tag, corpus in (("hc", hardcore_corpus()), ("sp", spin_corpus())):
        for k, (G, spec, delta) in enumerate(corpus):
            path = tmp_path / f"{tag}{k}.hg"
            path.write_text(serialize(G, spec))
            outs = []
            for threads in ("1", "4"):
                main(["compute", "--input", str(path), "--epsilon", "0.05", "--delta", str(delta),
                      "--threads", threads, "--omit-timing"])
                outs.append(capsys.readouterr().out)
            total += 1
            if outs[0] != outs[1]:
                mismatches.append(f"{tag}{k}")
    ok = not mismatches
    report(9, "determinism across threads 1/4", ok, f"{total} instances, mismatches {mismatches}")
    assert ok
