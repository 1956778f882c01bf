"""Acceptance gates for the package: seven checks, each recording one
pass/fail line in the terminal summary.

The Monte-Carlo checks are statistical but fully seeded, so reruns are
bit-identical; runtime budgets are asserted alongside the numeric
tolerances.
"""

import math
import time

import mpmath as mp
import numpy as np
import pytest

from structbandits import (
    BanditInstance,
    PolicySpec,
    bernoulli_model,
    gaussian_model,
    kl_div,
    solve,
    solve_classical,
    solve_dueling,
    solve_generic_oracle,
    solve_linear,
    solve_lipschitz,
    solve_unimodal,
    write_aggregate_csv,
)
from structbandits.harness import (
    build_policy,
    generate_classical_instance,
    generate_dueling_instance,
    generate_linear_instance,
    generate_lipschitz_instance,
    generate_unimodal_instance,
    run_episode,
    run_monte_carlo,
)
from structbandits.structures import (
    classical_structure,
    gap_vector,
    linear_structure,
    optimal_arm,
    unimodal_structure,
)

from conftest import record_acceptance

mp.mp.dps = 50


def _record(number, name, ok, detail):
    record_acceptance("criterion %d (%s): %s: %s"
                      % (number, name, "PASS" if ok else "FAIL", detail))


def _mp_kl(model_kind, p, q):
    p, q = mp.mpf(float(p)), mp.mpf(float(q))
    if model_kind == "gaussian":
        return (p - q) ** 2 / 2
    out = mp.mpf(0)
    if p > 0:
        out += p * mp.log(p / q)
    if p < 1:
        out += (1 - p) * mp.log((1 - p) / (1 - q))
    return out


def test_criterion_1_closed_form_rates():
    start = time.perf_counter()
    max_rel = 0.0
    for i in range(100):
        kind = "bernoulli" if i % 2 == 0 else "gaussian"
        model = bernoulli_model() if kind == "bernoulli" else gaussian_model()
        n = 2 + i % 7
        inst = generate_classical_instance(n, kind, seed=9000 + i,
                                           min_gap=0.01)
        sol = solve_classical(model, inst.theta)
        best = int(np.argmax(inst.theta))
        for x in range(n):
            if x == best:
                continue
            expected = float(1 / _mp_kl(kind, inst.theta[x],
                                        inst.theta[best]))
            rel = abs(sol.rates[x] - expected) / expected
            max_rel = max(max_rel, rel)
    elapsed = time.perf_counter() - start
    ok = max_rel <= 1e-9 and elapsed < 1.0
    _record(1, "closed-form classical rates", ok,
            "max rel err %.2e (tol 1e-9) in %.2fs (budget 1s)"
            % (max_rel, elapsed))
    assert max_rel <= 1e-9
    assert elapsed < 1.0


def _lipschitz_bundle_instance(n_arms, start_seed, min_gap=0.03):
    for seed in range(start_seed, start_seed + 200):
        inst = generate_lipschitz_instance(n_arms, seed)
        top = np.sort(inst.theta)[-2:]
        if top[1] - top[0] >= min_gap:
            return inst
    raise RuntimeError("no suitable instance in seed range")


def test_criterion_2_oracle_cross_validation():
    start = time.perf_counter()
    bern, gauss = bernoulli_model(), gaussian_model()
    lip4 = _lipschitz_bundle_instance(4, 20)
    lip6 = _lipschitz_bundle_instance(6, 60)
    rng = np.random.default_rng(77)
    feats4 = rng.standard_normal((4, 2))
    feats4 /= np.linalg.norm(feats4, axis=1, keepdims=True)
    feats6 = rng.standard_normal((6, 3))
    feats6 /= np.linalg.norm(feats6, axis=1, keepdims=True)
    uni5 = generate_unimodal_instance(5, seed=8)
    duel2 = generate_dueling_instance(2, seed=3)

    cases = [
        ("classical-bern",
         lambda: solve_classical(bern, np.array([0.2, 0.45, 0.7, 0.5])),
         classical_structure(4), bern, np.array([0.2, 0.45, 0.7, 0.5]),
         0.02),
        ("classical-gauss",
         lambda: solve_classical(gauss,
                                 np.array([0.0, 0.6, 1.0, 0.3, 0.8])),
         classical_structure(5), gauss, np.array([0.0, 0.6, 1.0, 0.3, 0.8]),
         0.02),
        ("unimodal-gauss",
         lambda: solve_unimodal(gauss, np.array([0.1, 0.2, 0.3, 0.2])),
         unimodal_structure(4), gauss, np.array([0.1, 0.2, 0.3, 0.2]),
         0.05),
        ("unimodal-bern",
         lambda: solve_unimodal(bern, uni5.theta),
         uni5.structure, bern, uni5.theta, 0.05),
        ("lipschitz-4",
         lambda: solve_lipschitz(bern, lip4.theta,
                                 lip4.structure.distances),
         lip4.structure, bern, lip4.theta, 0.02),
        ("lipschitz-6",
         lambda: solve_lipschitz(bern, lip6.theta,
                                 lip6.structure.distances),
         lip6.structure, bern, lip6.theta, 0.02),
        ("linear-d2",
         lambda: solve_linear(feats4, feats4 @ np.array([0.8, 0.3])),
         linear_structure(feats4), gauss, feats4 @ np.array([0.8, 0.3]),
         0.05),
        ("linear-d3",
         lambda: solve_linear(feats6,
                              feats6 @ np.array([0.8, 0.3, 0.5])),
         linear_structure(feats6), gauss,
         feats6 @ np.array([0.8, 0.3, 0.5]), 0.05),
        ("dueling-2",
         lambda: solve_dueling(duel2.theta, 2),
         duel2.structure, bern, duel2.theta, 0.05),
    ]

    worst = ("", 0.0)
    failures = []
    for name, solve_fn, structure, model, theta, tol in cases:
        direct = solve_fn()
        oracle = solve_generic_oracle(structure, model, theta)
        rel = abs(direct.value - oracle.value) / max(abs(oracle.value),
                                                     1e-12)
        if rel > worst[1]:
            worst = (name, rel)
        if rel > tol:
            failures.append("%s rel %.3g > %.2g" % (name, rel, tol))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60.0
    _record(2, "oracle cross-validation", ok,
            "%d structures, worst %s rel %.2e, %.1fs (budget 60s)%s"
            % (len(cases), worst[0], worst[1], elapsed,
               ("; " + "; ".join(failures)) if failures else ""))
    assert not failures, failures
    assert elapsed < 60.0


def test_criterion_3_linear_basis_instance():
    feats = np.eye(2)
    sol = solve_linear(feats, feats @ np.array([1.0, 0.5]))
    c_err = abs(sol.value - 4.0)
    r_err = abs(sol.rates[1] - 8.0)
    ok = c_err <= 1e-3 and r_err <= 1e-3
    _record(3, "two-arm basis design", ok,
            "C err %.2e, rate err %.2e (tol 1e-3)" % (c_err, r_err))
    assert c_err <= 1e-3
    assert r_err <= 1e-3


def test_criterion_4_rate_matching_regret_trend():
    start = time.perf_counter()
    checkpoints = [1000, 10000, 100000]
    summaries = []
    ok_all = True
    for kind, theta, c_value in (
            ("gaussian", np.array([0.0, 1.0]), 2.0),
            ("bernoulli", np.array([0.5, 0.6]), 4.899319652320361)):
        model = bernoulli_model() if kind == "bernoulli" else gaussian_model()
        inst = BanditInstance(classical_structure(2), model, theta,
                              "trend-%s" % kind)
        ratios = np.empty((100, 3))
        for k in range(100):
            policy = build_policy(PolicySpec("ossb", {}), inst)
            trace = run_episode(inst, policy, 100000, seed=1004,
                                obs_stream=k, checkpoints=checkpoints)
            ratios[k] = trace.cum_regret / np.log(checkpoints)
        final = ratios[:, -1].mean()
        bound = 3.0 * c_value
        within = final <= bound
        trend_ok = True
        trend_bits = []
        for j in range(2):
            diffs = ratios[:, j] - ratios[:, j + 1]
            se = diffs.std(ddof=1) / math.sqrt(diffs.shape[0])
            trend_bits.append("%.3f>=%.3f-se(%.3f)"
                              % (ratios[:, j].mean(),
                                 ratios[:, j + 1].mean(), se))
            if diffs.mean() < -se:
                trend_ok = False
        ok_all = ok_all and within and trend_ok
        summaries.append(
            "%s final %.2f <= %.2f %s, trend %s %s"
            % (kind, final, bound, "ok" if within else "VIOLATED",
               " | ".join(trend_bits), "ok" if trend_ok else "VIOLATED"))
    elapsed = time.perf_counter() - start
    ok = ok_all and elapsed < 600.0
    _record(4, "regret ratio trend at the solved rate", ok,
            "%s; %.0fs (budget 600s)" % ("; ".join(summaries), elapsed))
    assert ok_all, summaries
    assert elapsed < 600.0


def test_criterion_5_linear_experiment_ordering(tmp_path):
    start = time.perf_counter()
    instances = [generate_linear_instance(20, 3, 100 + i, phi_low=0.2,
                                          phi_high=0.4,
                                          instance_id="linear-%d" % i)
                 for i in range(10)]
    specs = [
        PolicySpec("ossb", {"epsilon": 0.0, "gamma": 0.0,
                            "resolve_period": 25, "projection": False}),
        PolicySpec("lin_thompson", {"delta": 0.1, "R": 1.0}),
        PolicySpec("glm_ucb", {}),
    ]
    traces, aggregates, failures = run_monte_carlo(
        instances, specs, 10000, 20, seed=2026)
    elapsed = time.perf_counter() - start
    assert not failures

    agg_path = tmp_path / "aggregate.csv"
    write_aggregate_csv(agg_path, aggregates, seed=2026)
    # the bundled plotting fixture is a frozen copy of this exact run
    fixture = open("frontend/testdata/aggregate.csv").read()
    assert agg_path.read_text() == fixture

    final = {a.policy: (a.mean[-1], a.ci95[-1]) for a in aggregates}
    om, oc = final["ossb"]
    bits = []
    ok = True
    for base in ("lin_thompson", "glm_ucb"):
        bm, bc = final[base]
        below = om < bm
        overlap = (om - oc) <= (bm + bc) and (bm - bc) <= (om + oc)
        bits.append("ossb %.1f+-%.1f vs %s %.1f+-%.1f (%s, CI %s)"
                    % (om, oc, base, bm, bc,
                       "below" if below else "NOT below",
                       "overlap" if overlap else "disjoint"))
        ok = ok and below
    budget_ok = elapsed < 900.0
    _record(5, "ordering against linear baselines", ok and budget_ok,
            "%s; %.0fs (budget 900s)" % ("; ".join(bits), elapsed))
    assert elapsed < 900.0
    assert ok, "; ".join(bits)


def test_criterion_6_property_suites():
    start = time.perf_counter()
    problems = []

    # phase accounting and regret identity on a mixed Monte-Carlo run
    instances = [generate_classical_instance(3, "bernoulli", 50 + i,
                                             min_gap=0.05)
                 for i in range(2)]
    specs = [PolicySpec("klucb", {}),
             PolicySpec("ossb", {"resolve_period": 5})]
    traces, aggregates, failures = run_monte_carlo(
        instances, specs, 400, 2, seed=31)
    if failures:
        problems.append("episodes failed: %d" % len(failures))
    for tr in traces:
        if tr.phase_counts is not None:
            for i, t in enumerate(tr.checkpoints):
                if tr.phase_counts[i].sum() != t:
                    problems.append("phase accounting broken at t=%d" % t)
        inst = next(ins for ins in instances
                    if ins.instance_id == tr.instance_id)
        identity = float(inst.gaps @ tr.final_counts)
        if not math.isclose(tr.cum_regret[-1], identity, rel_tol=1e-9,
                            abs_tol=1e-9):
            problems.append("regret identity broken for %s" % tr.policy)

    # solver feasibility residuals across the structure families
    residual = 0.0
    for i in range(5):
        cases = [
            solve(generate_classical_instance(
                4, "bernoulli", 300 + i, min_gap=0.02).structure,
                bernoulli_model(),
                generate_classical_instance(
                    4, "bernoulli", 300 + i, min_gap=0.02).theta),
            solve(generate_unimodal_instance(5, 310 + i).structure,
                  bernoulli_model(),
                  generate_unimodal_instance(5, 310 + i).theta),
            solve(generate_dueling_instance(3, 320 + i).structure,
                  bernoulli_model(),
                  generate_dueling_instance(3, 320 + i).theta),
        ]
        lips = _lipschitz_bundle_instance(5, 330 + 10 * i)
        cases.append(solve(lips.structure, bernoulli_model(), lips.theta))
        lin = generate_linear_instance(8, 3, 340 + i)
        cases.append(solve(lin.structure, gaussian_model(), lin.theta))
        residual = max(residual, max(s.max_violation for s in cases))
    if residual > 1e-6:
        problems.append("feasibility residual %.2e > 1e-6" % residual)

    # divergence properties on a grid
    bern = bernoulli_model()
    grid = np.linspace(0.05, 0.95, 13)
    for p in grid:
        if kl_div(bern, p, p) != 0.0:
            problems.append("kl identity broken at %.3f" % p)
        for q in grid:
            d = kl_div(bern, p, q)
            if d < 0.0 or d < 2.0 * (p - q) ** 2 - 1e-12:
                problems.append("kl bound broken at (%.2f, %.2f)" % (p, q))
    gauss = gaussian_model()
    for p in (-2.0, 0.0, 1.5):
        for q in (-1.0, 0.5, 3.0):
            if not math.isclose(kl_div(gauss, p, q), 0.5 * (p - q) ** 2,
                                rel_tol=1e-12, abs_tol=1e-15):
                problems.append("gaussian kl wrong at (%s, %s)" % (p, q))

    # determinism under parallelism
    _, seq, _ = run_monte_carlo(instances, specs, 400, 2, seed=31,
                                parallelism=1)
    _, par, _ = run_monte_carlo(instances, specs, 400, 2, seed=31,
                                parallelism=8)
    for a, b in zip(seq, par):
        if a.policy != b.policy or not np.array_equal(a.mean, b.mean) \
                or not np.array_equal(a.stderr, b.stderr):
            problems.append("parallel aggregates diverged for %s" % a.policy)

    elapsed = time.perf_counter() - start
    ok = not problems
    _record(6, "property suites", ok,
            "phases, regret identity, residual %.1e, divergence grid, "
            "workers 1 vs 8 bit-equal; %.0fs" % (residual, elapsed))
    assert not problems, problems


def test_criterion_7_bound_continuity():
    start = time.perf_counter()
    rng = np.random.default_rng(424)
    worst = 0.0
    checked = 0
    for i in range(25):
        inst = generate_classical_instance(5, "bernoulli", 700 + i,
                                           low=0.15, high=0.85,
                                           min_gap=0.05)
        base = solve_classical(bernoulli_model(), inst.theta).value
        delta = 1e-3 * rng.choice([-1.0, 1.0], inst.theta.shape[0])
        moved = solve_classical(bernoulli_model(), inst.theta + delta).value
        worst = max(worst, abs(moved - base) / base)
        checked += 1
    for i in range(25):
        inst = _lipschitz_bundle_instance(5, 800 + 10 * i, min_gap=0.05)
        dist = inst.structure.distances
        base = solve_lipschitz(bernoulli_model(), inst.theta, dist).value
        delta = 1e-3 * rng.choice([-1.0, 1.0], inst.theta.shape[0])
        moved = solve_lipschitz(bernoulli_model(), inst.theta + delta,
                                dist).value
        worst = max(worst, abs(moved - base) / base)
        checked += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 0.05
    _record(7, "bound continuity under perturbation", ok,
            "%d instances, worst rel change %.3f (tol 0.05); %.0fs"
            % (checked, worst, elapsed))
    assert checked == 50
    assert worst <= 0.05
