"""Bundled health checks: one small instance per structure, solved by
the closed form or LP route and cross-checked against the slow
discretized oracle, plus episode-level invariants.  Each check prints a
single pass/fail line; the run fails if any check does.
"""

import dataclasses
import time

import numpy as np

from . import _backend
from .bound_solver import SolveOptions, solve, solve_generic_oracle
from .core import bernoulli_model, gaussian_model
from .harness import BanditInstance, PolicySpec, build_policy, run_episode
from .lp import minimize_covering
from .structures import (
    classical_structure,
    dueling_structure,
    linear_structure,
    lipschitz_structure,
    unimodal_structure,
)

__all__ = ["CheckResult", "run_selfcheck", "format_results"]

# 1 / d(0.5, 0.6) for Bernoulli observations, frozen from an extended
# precision evaluation of p*log(p/q) + (1-p)*log((1-p)/(1-q)).
_FROZEN_TWO_ARM_C = 4.8993196523203599401


@dataclasses.dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    elapsed: float


def _rel_close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-12)


def _oracle_agrees(structure, model, theta, frac, resolution=64):
    """Closed/LP value vs the discretized oracle, which approaches the
    true value from below.  Passes when the oracle is within ``frac`` of
    the fast value and never meaningfully above it."""
    sol = solve(structure, model, theta)
    oracle = solve_generic_oracle(structure, model, theta,
                                  resolution=resolution)
    hi = sol.value * (1.0 + 1e-6) + 1e-9
    gap = (sol.value - oracle.value) / max(sol.value, 1e-12)
    ok = oracle.value <= hi and gap <= frac
    return ok, "value=%.6g oracle=%.6g rel_gap=%.2e" % (
        sol.value, oracle.value, gap)


def _check_backend():
    detail = "active kernel backend: %s" % _backend.BACKEND_NAME
    return True, detail


def _check_classical_frozen():
    sol = solve(classical_structure(2), bernoulli_model(),
                np.array([0.5, 0.6]))
    ok = _rel_close(sol.value, _FROZEN_TWO_ARM_C, 1e-9) \
        and sol.status == "exact"
    return ok, "C=%.12g expected %.12g (%s)" % (
        sol.value, _FROZEN_TWO_ARM_C, sol.status)


def _check_classical_oracle():
    theta = np.array([0.35, 0.55, 0.6, 0.42])
    return _oracle_agrees(classical_structure(4), bernoulli_model(), theta,
                          frac=0.02)


def _check_unimodal_frozen():
    sol = solve(unimodal_structure(4), gaussian_model(),
                np.array([0.1, 0.2, 0.3, 0.2]))
    want = np.array([0.0, 200.0, 0.0, 200.0])
    ok = _rel_close(sol.value, 40.0, 1e-9) \
        and np.allclose(sol.rates, want, rtol=1e-9, atol=1e-9)
    return ok, "C=%.12g rates=%s" % (sol.value, np.round(sol.rates, 6))


def _check_unimodal_oracle():
    theta = np.array([0.2, 0.45, 0.62, 0.5, 0.3])
    return _oracle_agrees(unimodal_structure(5), bernoulli_model(), theta,
                          frac=0.05)


def _check_lipschitz_oracle():
    pos = np.linspace(0.0, 1.0, 4)
    dist = np.abs(pos[:, None] - pos[None, :])
    theta = np.array([0.3, 0.52, 0.45, 0.4])
    return _oracle_agrees(lipschitz_structure(dist), bernoulli_model(),
                          theta, frac=0.02)


def _check_linear_frozen():
    feats = np.eye(2)
    theta = feats @ np.array([1.0, 0.5])
    sol = solve(linear_structure(feats), gaussian_model(), theta)
    ok = abs(sol.value - 4.0) <= 1e-3 and abs(sol.rates[1] - 8.0) <= 1e-3
    return ok, "C=%.6g rate[1]=%.6g (want 4, 8)" % (sol.value, sol.rates[1])


def _check_linear_oracle():
    rng = np.random.default_rng(12)
    feats = rng.standard_normal((4, 2))
    feats /= np.linalg.norm(feats, axis=1, keepdims=True)
    theta = feats @ np.array([0.9, 0.4])
    return _oracle_agrees(linear_structure(feats), gaussian_model(), theta,
                          frac=0.05, resolution=96)


def _check_dueling_oracle():
    mat = np.array([
        [0.5, 0.65, 0.7],
        [0.35, 0.5, 0.6],
        [0.3, 0.4, 0.5],
    ])
    return _oracle_agrees(dueling_structure(3), bernoulli_model(),
                          mat.ravel(), frac=0.05)


def _check_lp_feasibility():
    rng = np.random.default_rng(5)
    costs = rng.uniform(0.5, 2.0, 6)
    rows = rng.uniform(0.0, 1.0, (8, 6))
    rhs = rng.uniform(0.5, 1.5, 8)
    res = minimize_covering(costs, rows, rhs)
    ok = res.status == "optimal" and res.max_violation <= 1e-6 \
        and abs(res.value - costs @ res.x) <= 1e-9 * max(1.0, res.value)
    return ok, "status=%s violation=%.2e" % (res.status, res.max_violation)


def _episode(theta, kind, horizon, use_fast_path):
    if kind == "unimodal":
        structure = unimodal_structure(theta.shape[0])
    else:
        structure = classical_structure(theta.shape[0])
    inst = BanditInstance(structure, bernoulli_model(), theta, "selfcheck")
    policy = build_policy(PolicySpec("ossb"), inst)
    return run_episode(inst, policy, horizon, seed=99, obs_stream=3,
                       use_fast_path=use_fast_path)


def _check_episode_invariants():
    theta = np.array([0.4, 0.55, 0.6])
    tr = _episode(theta, "classical", 2000, use_fast_path=True)
    rounds_ok = all(int(tr.phase_counts[i].sum()) == int(tr.checkpoints[i])
                    for i in range(tr.checkpoints.shape[0]))
    gaps = np.max(theta) - theta
    ident = abs(tr.cum_regret[-1] - gaps @ tr.final_counts)
    ok = rounds_ok and ident <= 1e-9 * max(1.0, tr.cum_regret[-1]) \
        and int(tr.final_counts.sum()) == 2000
    return ok, "phases_account=%s regret_identity_err=%.2e" % (
        rounds_ok, ident)


def _check_fast_generic_parity():
    theta = np.array([0.35, 0.5, 0.62, 0.44])
    a = _episode(theta, "classical", 600, use_fast_path=True)
    b = _episode(theta, "classical", 600, use_fast_path=False)
    ok = np.array_equal(a.cum_regret, b.cum_regret) \
        and np.array_equal(a.phase_counts, b.phase_counts) \
        and np.array_equal(a.final_counts, b.final_counts) \
        and np.array_equal(a.final_means, b.final_means) and a.s == b.s
    return ok, "kernel path and generic path produced %s traces" % (
        "identical" if ok else "DIFFERENT")


def _check_determinism():
    theta = np.array([0.4, 0.6])
    a = _episode(theta, "classical", 800, use_fast_path=True)
    b = _episode(theta, "classical", 800, use_fast_path=True)
    ok = np.array_equal(a.cum_regret, b.cum_regret) \
        and np.array_equal(a.final_counts, b.final_counts)
    return ok, "repeat run bit-identical: %s" % ok


def _check_dueling_episode():
    mat = np.array([
        [0.5, 0.6, 0.7],
        [0.4, 0.5, 0.6],
        [0.3, 0.4, 0.5],
    ])
    inst = BanditInstance(dueling_structure(3), bernoulli_model(),
                          mat.ravel(), "selfcheck-duel")
    policy = build_policy(PolicySpec("ossb"), inst)
    tr = run_episode(inst, policy, 500, seed=31, obs_stream=7)
    ok = np.isfinite(tr.cum_regret[-1]) and tr.cum_regret[-1] >= 0.0 \
        and int(tr.phase_counts[-1].sum()) == 500
    return ok, "final regret %.4g over 500 rounds" % tr.cum_regret[-1]


_CHECKS = [
    ("backend", _check_backend),
    ("classical-frozen-value", _check_classical_frozen),
    ("classical-vs-oracle", _check_classical_oracle),
    ("unimodal-frozen-value", _check_unimodal_frozen),
    ("unimodal-vs-oracle", _check_unimodal_oracle),
    ("lipschitz-vs-oracle", _check_lipschitz_oracle),
    ("linear-frozen-value", _check_linear_frozen),
    ("linear-vs-oracle", _check_linear_oracle),
    ("dueling-vs-oracle", _check_dueling_oracle),
    ("lp-feasibility", _check_lp_feasibility),
    ("episode-invariants", _check_episode_invariants),
    ("fast-generic-parity", _check_fast_generic_parity),
    ("determinism", _check_determinism),
    ("dueling-episode", _check_dueling_episode),
]


def _check_injected():
    return False, "deliberate failure requested via --inject-failure"


def run_selfcheck(inject_failure=False):
    """Run every bundled check; returns ``(results, all_ok)``."""
    checks = list(_CHECKS)
    if inject_failure:
        checks.append(("injected-failure", _check_injected))
    results = []
    for name, fn in checks:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, "raised %s: %s" % (type(exc).__name__, exc)
        results.append(CheckResult(name, ok, detail,
                                   time.perf_counter() - start))
    return results, all(r.ok for r in results)


def format_results(results):
    lines = []
    for r in results:
        mark = "✅" if r.ok else "❌"
        lines.append("%s %-24s (%6.2fs) %s" % (mark, r.name, r.elapsed,
                                               r.detail))
    return "\n".join(lines)
