"""Sampling rules: the rate-matching algorithm built on the bound
solver, and the baselines it is compared against (KL-UCB, linear
Thompson sampling, GLM-UCB, and a solve-once static allocation).

Every policy follows the same driving protocol used by the harness:
``reset(rng)`` clears state, ``select(t)`` returns ``(arm, phase_tag)``
for round ``t`` (1-based), and ``observe(arm, y)`` folds in the
observation.  Policies never draw randomness outside the generator they
were reset with, which keeps episodes replayable.
"""

import dataclasses
import enum
import math

import numpy as np

from . import bound_solver, lp
from .core import BERNOULLI, kl_div
from .structures import (
    DUELING,
    LINEAR,
    NoCondorcetWinnerError,
    RankDeficientError,
    optimal_arm,
    project_to_structure,
)

__all__ = [
    "PhaseTag",
    "OssbConfig",
    "OssbState",
    "ossb_init",
    "ossb_step",
    "ossb_observe",
    "OssbPolicy",
    "KlUcbPolicy",
    "LinThompsonPolicy",
    "GlmUcbPolicy",
    "StaticAllocationPolicy",
    "klucb_index",
]


class PhaseTag(enum.IntEnum):
    INIT = 0
    EXPLOIT = 1
    ESTIMATE = 2
    EXPLORE = 3

    @property
    def short(self):
        return self.name.lower()


_SOLVER_FAILURES = (bound_solver.BoundSolverError, lp.LpError,
                    NoCondorcetWinnerError)


@dataclasses.dataclass
class OssbConfig:
    """Tuning knobs of the rate-matching rule.

    ``epsilon`` (default ``0.9 / n_arms``) gates the estimation phase
    and must stay below ``1 / n_arms``; 0 disables estimation entirely.
    ``gamma`` inflates the exploitation test's rate targets.
    ``resolve_period`` re-solves the exploration program every that many
    rounds, reusing the previous rates in between (1 = every round).
    ``projection`` projects raw means onto the structure before solving;
    defaults on for linear and dueling structures, off otherwise.
    """

    epsilon: float = None
    gamma: float = 0.0
    resolve_period: int = 1
    projection: bool = None
    solver: bound_solver.SolveOptions = \
        dataclasses.field(default_factory=bound_solver.SolveOptions)

    def epsilon_for(self, n_arms):
        eps = 0.9 / n_arms if self.epsilon is None else float(self.epsilon)
        if not 0.0 <= eps < 1.0 / n_arms:
            raise ValueError(
                "epsilon must lie in [0, 1/n_arms); got %r for %d arms"
                % (eps, n_arms))
        return eps

    def projection_for(self, structure):
        if self.projection is None:
            return structure.kind in (LINEAR, DUELING)
        return bool(self.projection)


@dataclasses.dataclass
class OssbState:
    counts: np.ndarray
    means: np.ndarray
    s: int
    t: int
    phase_counts: np.ndarray
    rates: np.ndarray = None
    solve_age: int = 0
    cache: bound_solver.LinearCutCache = None
    last_solution: bound_solver.BoundSolution = None
    solver_failures: int = 0
    last_error: str = None


def ossb_init(structure, model, config):
    n = structure.n_arms
    config.epsilon_for(n)  # validate eagerly
    cache = bound_solver.LinearCutCache() if structure.kind == LINEAR else None
    return OssbState(
        counts=np.zeros(n), means=np.zeros(n), s=0, t=1,
        phase_counts=np.zeros(4, dtype=np.int64), cache=cache,
        solve_age=config.resolve_period)


def _estimate(state, config, structure):
    if not config.projection_for(structure):
        return state.means
    weights = state.counts if structure.kind == LINEAR else None
    try:
        return project_to_structure(structure, state.means, weights=weights)
    except RankDeficientError:
        return state.means


def ossb_step(state, config, structure, model):
    """Choose the arm for round ``state.t``; returns ``(arm, tag, state)``.

    The caller must follow up with :func:`ossb_observe`.  Rounds
    ``t <= n_arms`` play round-robin so every arm has one observation
    before the first solve.  After that: exploit when every arm meets
    its rate target ``c(x) * (1 + gamma) * ln t``, otherwise bump the
    non-exploit counter ``s`` and either estimate (play the least-played
    arm when its count lags ``epsilon * s``) or explore (play the arm
    furthest below its rate target).  Solver failures on unstructured
    estimates are tallied in ``state.solver_failures`` and degrade to
    the previous rates, or to an estimation round when none exist yet.
    """
    n = structure.n_arms
    t = state.t
    if t <= n:
        arm, tag = t - 1, PhaseTag.INIT
        state.phase_counts[tag] += 1
        return arm, tag, state

    est = _estimate(state, config, structure)
    if state.solve_age >= config.resolve_period:
        try:
            sol = bound_solver.solve(structure, model, est,
                                     config.solver, cache=state.cache)
            state.rates = sol.rates
            state.last_solution = sol
        except _SOLVER_FAILURES as exc:
            # keep any stale rates; retry on the next period boundary
            state.solver_failures += 1
            state.last_error = str(exc)
        # Age 1, not 0: this attempt serves the current round, so
        # resolve_period=1 means an attempt on every round.
        state.solve_age = 1
    else:
        state.solve_age += 1
    if state.rates is None:
        # no usable rates yet: force an estimation round
        state.s += 1
        arm, tag = int(np.argmin(state.counts)), PhaseTag.ESTIMATE
        state.phase_counts[tag] += 1
        return arm, tag, state

    rates = state.rates
    gfac = 1.0 + config.gamma
    lnt = math.log(t)
    if np.all(state.counts >= rates * gfac * lnt):
        arm, tag = optimal_arm(structure, est), PhaseTag.EXPLOIT
    else:
        state.s += 1
        least = int(np.argmin(state.counts))
        if state.counts[least] <= config.epsilon_for(n) * state.s:
            arm, tag = least, PhaseTag.ESTIMATE
        else:
            ratio = np.full(n, math.inf)
            positive = rates > 0.0
            ratio[positive] = state.counts[positive] / rates[positive]
            arm, tag = int(np.argmin(ratio)), PhaseTag.EXPLORE
    state.phase_counts[tag] += 1
    return arm, tag, state


def ossb_observe(state, arm, y):
    """Fold one observation into the running means and advance the round."""
    state.means[arm] = ((state.means[arm] * state.counts[arm] + y)
                        / (state.counts[arm] + 1.0))
    state.counts[arm] += 1.0
    state.t += 1


class OssbPolicy:
    name = "ossb"

    def __init__(self, structure, model, config=None):
        self.structure = structure
        self.model = model
        self.config = config or OssbConfig()
        self.state = None

    def reset(self, rng=None):
        self.state = ossb_init(self.structure, self.model, self.config)

    def select(self, t):
        arm, tag, _ = ossb_step(self.state, self.config, self.structure,
                                self.model)
        return arm, tag

    def observe(self, arm, y):
        ossb_observe(self.state, arm, y)


def klucb_index(model, mean, count, log_t, tol=1e-6):
    """Upper confidence index: the largest ``q`` with
    ``count * kl(mean, q) <= log_t``, found by bisection to ``tol``."""
    if count <= 0:
        return math.inf
    budget = log_t / count
    if budget <= 0.0:
        return float(mean)
    if model.kind == BERNOULLI:
        hi = 1.0
        if kl_div(model, mean, hi) <= budget:
            return hi
    else:
        hi = mean + math.sqrt(2.0 * budget)
        if kl_div(model, mean, hi) <= budget:
            return hi
    lo = float(mean)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kl_div(model, mean, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


class KlUcbPolicy:
    name = "klucb"

    def __init__(self, model, n_arms):
        self.model = model
        self.n_arms = n_arms
        self.counts = None
        self.means = None

    def reset(self, rng=None):
        self.counts = np.zeros(self.n_arms)
        self.means = np.zeros(self.n_arms)

    def select(self, t):
        for x in range(self.n_arms):
            if self.counts[x] == 0:
                return x, "init"
        log_t = math.log(t)
        best, best_idx = 0, -math.inf
        for x in range(self.n_arms):
            idx = klucb_index(self.model, float(self.means[x]),
                              self.counts[x], log_t)
            if idx > best_idx:
                best, best_idx = x, idx
        return best, "ucb"

    def observe(self, arm, y):
        self.means[arm] = ((self.means[arm] * self.counts[arm] + y)
                           / (self.counts[arm] + 1.0))
        self.counts[arm] += 1.0


class LinThompsonPolicy:
    """Posterior sampling on a linear model with inflation
    ``v_t = R * sqrt(0.5 * d * ln(t / delta))``."""

    name = "lin_thompson"

    def __init__(self, features, delta=0.1, R=1.0):
        self.features = np.ascontiguousarray(features, dtype=np.float64)
        self.delta = float(delta)
        self.R = float(R)
        self.rng = None
        self.B = None
        self.f = None

    def reset(self, rng):
        d = self.features.shape[1]
        self.rng = rng
        self.B = np.eye(d)
        self.f = np.zeros(d)

    def select(self, t):
        d = self.features.shape[1]
        phi_hat = np.linalg.solve(self.B, self.f)
        v = self.R * math.sqrt(0.5 * d * math.log(t / self.delta))
        if v > 0.0:
            chol = np.linalg.cholesky(self.B)
            z = self.rng.standard_normal(d)
            phi = phi_hat + v * np.linalg.solve(chol.T, z)
        else:
            phi = phi_hat
        return int(np.argmax(self.features @ phi)), "sample"

    def observe(self, arm, y):
        x = self.features[arm]
        self.B += np.outer(x, x)
        self.f += y * x


class GlmUcbPolicy:
    """Linear UCB with exploration width ``rho(t) = sqrt(0.5 * ln t)``."""

    name = "glm_ucb"

    def __init__(self, features):
        self.features = np.ascontiguousarray(features, dtype=np.float64)
        self.B = None
        self.f = None

    def reset(self, rng=None):
        d = self.features.shape[1]
        self.B = np.eye(d)
        self.f = np.zeros(d)

    def select(self, t):
        phi_hat = np.linalg.solve(self.B, self.f)
        rho = math.sqrt(0.5 * math.log(t))
        scores = self.features @ phi_hat
        if rho > 0.0:
            M = np.linalg.solve(self.B, self.features.T)
            widths = np.sqrt(np.sum(self.features * M.T, axis=1))
            scores = scores + rho * widths
        return int(np.argmax(scores)), "ucb"

    def observe(self, arm, y):
        x = self.features[arm]
        self.B += np.outer(x, x)
        self.f += y * x


class StaticAllocationPolicy:
    """Round-robin warmup, one bound solve at the warmup estimate, then
    track the frozen targets ``c(x) * ln t`` and play greedily once met."""

    name = "static_alloc"

    def __init__(self, structure, model, warmup=None, config=None):
        self.structure = structure
        self.model = model
        self.warmup = 3 * structure.n_arms if warmup is None else int(warmup)
        self.config = config or OssbConfig()
        self.counts = None
        self.means = None
        self.rates = None
        self.solve_failed = False

    def reset(self, rng=None):
        n = self.structure.n_arms
        self.counts = np.zeros(n)
        self.means = np.zeros(n)
        self.rates = None
        self.solve_failed = False

    def _solve_once(self):
        est = self.means
        if self.config.projection_for(self.structure):
            try:
                weights = self.counts \
                    if self.structure.kind == LINEAR else None
                est = project_to_structure(self.structure, self.means,
                                           weights=weights)
            except RankDeficientError:
                pass
        try:
            sol = bound_solver.solve(self.structure, self.model, est,
                                     self.config.solver)
            self.rates = sol.rates
        except _SOLVER_FAILURES:
            self.rates = np.zeros(self.structure.n_arms)
            self.solve_failed = True

    def select(self, t):
        n = self.structure.n_arms
        if t <= self.warmup:
            return (t - 1) % n, "warmup"
        if self.rates is None:
            self._solve_once()
        targets = self.rates * math.log(t)
        if np.all(self.counts >= targets):
            est = self.means
            if self.config.projection_for(self.structure):
                try:
                    weights = self.counts \
                        if self.structure.kind == LINEAR else None
                    est = project_to_structure(self.structure, self.means,
                                               weights=weights)
                except RankDeficientError:
                    pass
            return optimal_arm(self.structure, est), "greedy"
        ratio = np.full(n, math.inf)
        positive = self.rates > 0.0
        ratio[positive] = self.counts[positive] / self.rates[positive]
        return int(np.argmin(ratio)), "explore"

    def observe(self, arm, y):
        self.means[arm] = ((self.means[arm] * self.counts[arm] + y)
                           / (self.counts[arm] + 1.0))
        self.counts[arm] += 1.0
