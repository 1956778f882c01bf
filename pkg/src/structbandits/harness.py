"""Experiment harness: bandit instances, seeded episodes, a parallel
Monte-Carlo driver, and the CSV formats consumed by downstream tooling.

Determinism contract: every episode's observations come from a
counter-based stream keyed by ``(seed, stream_id)`` and are pre-drawn
per round, so results are bit-identical across runs, across worker
counts, and across kernel backends.  Observation streams are keyed by
``(instance, trial)`` only, so different policies face the same noise
(paired comparisons); policy-internal randomness gets its own stream.
"""

import concurrent.futures
import csv
import dataclasses
import time
import traceback

import numpy as np

from . import _backend
from .algorithms import (
    GlmUcbPolicy,
    KlUcbPolicy,
    LinThompsonPolicy,
    OssbConfig,
    OssbPolicy,
    StaticAllocationPolicy,
)
from .bound_solver import SolveOptions
from .core import (
    BERNOULLI,
    GAUSSIAN,
    RngStream,
    bernoulli_model,
    gaussian_model,
)
from .structures import (
    CLASSICAL,
    DUELING,
    LINEAR,
    LIPSCHITZ,
    UNIMODAL,
    classical_structure,
    dueling_structure,
    gap_vector,
    linear_structure,
    lipschitz_structure,
    unimodal_structure,
    validate_dueling_means,
)

__all__ = [
    "BanditInstance",
    "PolicySpec",
    "RegretTrace",
    "AggregateResult",
    "default_checkpoints",
    "build_policy",
    "run_episode",
    "run_monte_carlo",
    "aggregate_traces",
    "write_traces_csv",
    "write_aggregate_csv",
    "read_aggregate_csv",
    "generate_classical_instance",
    "generate_linear_instance",
    "generate_lipschitz_instance",
    "generate_unimodal_instance",
    "generate_dueling_instance",
]

TRACE_HEADER = ["policy", "instance_id", "trial", "round", "cum_regret",
                "phase"]
AGGREGATE_HEADER = ["policy", "round", "mean", "stderr", "ci95", "n"]


@dataclasses.dataclass
class BanditInstance:
    """A structure, an observation model, and the true parameter."""

    structure: object
    model: object
    theta: np.ndarray
    instance_id: str = "instance"

    def __post_init__(self):
        theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        if theta.shape[0] != self.structure.n_arms:
            raise ValueError("theta length does not match arm count")
        self.model.validate_means(theta)
        if self.structure.kind == DUELING:
            validate_dueling_means(theta, self.structure.n_items)
        self.theta = theta

    @property
    def gaps(self):
        return gap_vector(self.structure, self.theta)


@dataclasses.dataclass
class PolicySpec:
    """Serializable policy recipe; built per episode so parallel workers
    never share mutable policy state."""

    name: str
    params: dict = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class RegretTrace:
    policy: str
    instance_id: str
    trial: int
    checkpoints: np.ndarray
    cum_regret: np.ndarray
    phase_counts: np.ndarray = None  # (n_cp, 4) init/exploit/estimate/explore
    final_counts: np.ndarray = None
    final_means: np.ndarray = None
    s: int = None
    elapsed: float = 0.0


@dataclasses.dataclass
class AggregateResult:
    policy: str
    checkpoints: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    ci95: np.ndarray
    n: int


def default_checkpoints(horizon):
    """Geometric rounds 1, 2, 4, ... plus the horizon itself."""
    cps = []
    v = 1
    while v < horizon:
        cps.append(v)
        v *= 2
    cps.append(int(horizon))
    return np.array(cps, dtype=np.int64)


def _resolve_checkpoints(checkpoints, horizon):
    if checkpoints is None:
        return default_checkpoints(horizon)
    cps = np.array(sorted(set(int(c) for c in checkpoints)), dtype=np.int64)
    if cps.size == 0 or cps[0] < 1 or cps[-1] > horizon:
        raise ValueError("checkpoints must lie in [1, horizon]")
    return cps


_OSSB_CONFIG_KEYS = {"epsilon", "gamma", "resolve_period", "projection"}
_SOLVER_KEYS = {"c_max", "tol", "max_iter", "ridge", "oracle_resolution"}


def _ossb_config(params):
    cfg_kwargs = {k: v for k, v in params.items() if k in _OSSB_CONFIG_KEYS}
    solver_kwargs = {k: v for k, v in params.items() if k in _SOLVER_KEYS}
    unknown = set(params) - _OSSB_CONFIG_KEYS - _SOLVER_KEYS
    if unknown:
        raise ValueError("unknown ossb parameters: %s" % sorted(unknown))
    return OssbConfig(solver=SolveOptions(**solver_kwargs), **cfg_kwargs)


def build_policy(spec, instance):
    """Instantiate the policy named by ``spec`` for ``instance``."""
    name, params = spec.name, dict(spec.params)
    structure, model = instance.structure, instance.model
    if name == "ossb":
        return OssbPolicy(structure, model, _ossb_config(params))
    if name == "klucb":
        return KlUcbPolicy(model, structure.n_arms)
    if name == "lin_thompson":
        if structure.kind != LINEAR:
            raise ValueError("lin_thompson requires a linear structure")
        return LinThompsonPolicy(structure.features, **params)
    if name == "glm_ucb":
        if structure.kind != LINEAR:
            raise ValueError("glm_ucb requires a linear structure")
        return GlmUcbPolicy(structure.features)
    if name == "static_alloc":
        warmup = params.pop("warmup", None)
        cfg = _ossb_config(params)
        return StaticAllocationPolicy(structure, model, warmup=warmup,
                                      config=cfg)
    raise ValueError("unknown policy %r" % (name,))


def _fast_path_args(policy, instance):
    if not isinstance(policy, OssbPolicy):
        return None
    structure = instance.structure
    if structure.kind not in (CLASSICAL, UNIMODAL):
        return None
    cfg = policy.config
    if cfg.resolve_period != 1 or cfg.projection_for(structure):
        return None
    return {
        "model_kind": 0 if instance.model.kind == BERNOULLI else 1,
        "neighbor_only": 1 if structure.kind == UNIMODAL else 0,
        "epsilon": cfg.epsilon_for(structure.n_arms),
        "gamma": cfg.gamma,
        "c_max": cfg.solver.c_max,
    }


def run_episode(instance, policy, horizon, seed, obs_stream=0,
                policy_stream=None, checkpoints=None, use_fast_path=True):
    """Run one seeded episode and return its :class:`RegretTrace`.

    ``obs_stream`` indexes the observation noise stream (shared across
    policies for paired comparisons); ``policy_stream`` indexes the
    policy's private randomness and defaults to ``obs_stream``.  Regret
    is pseudo-regret: the true gap of the played arm accumulates each
    round regardless of the drawn observation.
    """
    horizon = int(horizon)
    cps = _resolve_checkpoints(checkpoints, horizon)
    if policy_stream is None:
        policy_stream = obs_stream
    obs_rng = RngStream(seed, 2 * obs_stream).generator()
    pol_rng = RngStream(seed, 2 * policy_stream + 1).generator()
    theta = instance.theta
    gaps = instance.gaps
    if instance.model.kind == BERNOULLI:
        noise = obs_rng.random(horizon)
    else:
        noise = obs_rng.standard_normal(horizon)

    start = time.perf_counter()
    fast = _fast_path_args(policy, instance) if use_fast_path else None
    if fast is not None:
        regret_cp, phase_cp, final_counts, final_means, s = \
            _backend.run_rate_matching_episode(
                fast["model_kind"], fast["neighbor_only"], theta, gaps,
                noise, horizon, fast["epsilon"], fast["gamma"],
                fast["c_max"], cps)
    else:
        policy.reset(pol_rng)
        n = instance.structure.n_arms
        counts = np.zeros(n, dtype=np.int64)
        is_ossb = isinstance(policy, OssbPolicy)
        regret_cp = np.zeros(cps.shape[0])
        phase_cp = np.zeros((cps.shape[0], 4), dtype=np.int64) \
            if is_ossb else None
        cum = 0.0
        icp = 0
        bern = instance.model.kind == BERNOULLI
        for t in range(1, horizon + 1):
            arm, _tag = policy.select(t)
            if bern:
                y = 1.0 if noise[t - 1] < theta[arm] else 0.0
            else:
                y = theta[arm] + noise[t - 1]
            policy.observe(arm, y)
            counts[arm] += 1
            cum += gaps[arm]
            if icp < cps.shape[0] and t == cps[icp]:
                regret_cp[icp] = cum
                if is_ossb:
                    phase_cp[icp] = policy.state.phase_counts
                icp += 1
        final_counts = counts
        final_means = policy.state.means.copy() if is_ossb else None
        s = policy.state.s if is_ossb else None
    elapsed = time.perf_counter() - start

    return RegretTrace(
        policy=policy.name,
        instance_id=instance.instance_id,
        trial=0,
        checkpoints=cps,
        cum_regret=regret_cp,
        phase_counts=phase_cp,
        final_counts=np.asarray(final_counts, dtype=np.int64),
        final_means=final_means,
        s=s,
        elapsed=elapsed,
    )


def _episode_job(args):
    (instance, spec, horizon, seed, obs_stream, policy_stream, cps,
     trial) = args
    policy = build_policy(spec, instance)
    trace = run_episode(instance, policy, horizon, seed,
                        obs_stream=obs_stream, policy_stream=policy_stream,
                        checkpoints=cps)
    trace.trial = trial
    return trace


def _episode_job_safe(args):
    try:
        return ("ok", _episode_job(args))
    except Exception:
        spec, instance, trial = args[1], args[0], args[7]
        key = (spec.name, instance.instance_id, trial)
        return ("error", (key, traceback.format_exc(limit=10)))


def run_monte_carlo(instances, policy_specs, horizon, n_trials, seed,
                    parallelism=1, checkpoints=None):
    """Run ``len(instances) * n_trials`` episodes per policy.

    Returns ``(traces, aggregates, failures)``: the per-episode traces
    in deterministic job order, one :class:`AggregateResult` per policy
    over its successful episodes, and a list of ``(key, traceback)``
    pairs for episodes that raised.  Results do not depend on
    ``parallelism``.
    """
    horizon = int(horizon)
    cps = _resolve_checkpoints(checkpoints, horizon)
    n_inst = len(instances)
    jobs = []
    for pi, spec in enumerate(policy_specs):
        for ii, instance in enumerate(instances):
            for k in range(n_trials):
                obs_stream = ii * n_trials + k
                policy_stream = ((1 + pi) * n_inst * n_trials
                                 + ii * n_trials + k)
                jobs.append((instance, spec, horizon, seed, obs_stream,
                             policy_stream, cps, k))

    if parallelism <= 1:
        outcomes = [_episode_job_safe(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=int(parallelism)) as pool:
            outcomes = list(pool.map(_episode_job_safe, jobs, chunksize=1))

    traces = [payload for kind, payload in outcomes if kind == "ok"]
    failures = [payload for kind, payload in outcomes if kind == "error"]
    if not traces and failures:
        raise RuntimeError(
            "all %d episodes failed; first failure:\n%s"
            % (len(failures), failures[0][1]))
    policy_names = [spec.name for spec in policy_specs]
    aggregates = aggregate_traces(traces, policy_names)
    return traces, aggregates, failures


def aggregate_traces(traces, policy_names=None):
    """Mean, standard error, and 95% interval of cumulative regret per
    policy per checkpoint.  ``stderr`` uses the sample standard
    deviation (ddof=1) over episodes; with one episode it is 0."""
    if policy_names is None:
        seen = []
        for tr in traces:
            if tr.policy not in seen:
                seen.append(tr.policy)
        policy_names = seen
    results = []
    for name in policy_names:
        rows = [tr.cum_regret for tr in traces if tr.policy == name]
        if not rows:
            continue
        cps = next(tr.checkpoints for tr in traces if tr.policy == name)
        stacked = np.vstack(rows)
        mean = stacked.mean(axis=0)
        n = stacked.shape[0]
        if n > 1:
            stderr = stacked.std(axis=0, ddof=1) / np.sqrt(n)
        else:
            stderr = np.zeros_like(mean)
        results.append(AggregateResult(
            policy=name, checkpoints=cps, mean=mean, stderr=stderr,
            ci95=1.96 * stderr, n=n))
    return results


def _fmt(x):
    return format(float(x), ".17g")


def write_traces_csv(path, traces, seed=None):
    """Per-episode rows at each checkpoint.  The ``phase`` column holds
    cumulative ``init|exploit|estimate|explore`` round tallies for
    policies that track phases, empty otherwise.  Lines starting with
    ``#`` are comments."""
    with open(path, "w", newline="") as fh:
        if seed is not None:
            fh.write("# seed=%d\n" % int(seed))
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for tr in traces:
            for i in range(tr.checkpoints.shape[0]):
                if tr.phase_counts is None:
                    phase = ""
                else:
                    phase = "|".join(str(int(v)) for v in tr.phase_counts[i])
                writer.writerow([tr.policy, tr.instance_id, tr.trial,
                                 int(tr.checkpoints[i]),
                                 _fmt(tr.cum_regret[i]), phase])


def write_aggregate_csv(path, aggregates, seed=None):
    """Aggregate curves, one row per policy per checkpoint."""
    with open(path, "w", newline="") as fh:
        if seed is not None:
            fh.write("# seed=%d\n" % int(seed))
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_HEADER)
        for agg in aggregates:
            for i in range(agg.checkpoints.shape[0]):
                writer.writerow([agg.policy, int(agg.checkpoints[i]),
                                 _fmt(agg.mean[i]), _fmt(agg.stderr[i]),
                                 _fmt(agg.ci95[i]), agg.n])


def read_aggregate_csv(path):
    """Inverse of :func:`write_aggregate_csv`; returns
    ``{policy: {"round": array, "mean": array, "stderr": array,
    "ci95": array, "n": int}}``."""
    rows = []
    with open(path, newline="") as fh:
        plain = (line for line in fh if not line.startswith("#"))
        reader = csv.reader(plain)
        header = next(reader)
        if header != AGGREGATE_HEADER:
            raise ValueError("unexpected aggregate header: %r" % (header,))
        rows = list(reader)
    out = {}
    for policy, rnd, mean, stderr, ci95, n in rows:
        entry = out.setdefault(policy, {"round": [], "mean": [],
                                        "stderr": [], "ci95": [],
                                        "n": int(n)})
        entry["round"].append(int(rnd))
        entry["mean"].append(float(mean))
        entry["stderr"].append(float(stderr))
        entry["ci95"].append(float(ci95))
    for entry in out.values():
        for key in ("round", "mean", "stderr", "ci95"):
            entry[key] = np.array(entry[key])
    return out


def generate_classical_instance(n_arms, model_kind, seed, low=0.1, high=0.9,
                                min_gap=0.0, instance_id=None):
    """Independent arms with means uniform in ``[low, high]``; redraws
    until the top-two gap reaches ``min_gap``."""
    rng = RngStream(seed, 101).generator()
    model = bernoulli_model() if model_kind == BERNOULLI else gaussian_model()
    for _ in range(1000):
        theta = rng.uniform(low, high, n_arms)
        top = np.sort(theta)[-2:]
        if top[1] - top[0] >= min_gap:
            return BanditInstance(classical_structure(n_arms), model, theta,
                                  instance_id or "classical-%d" % seed)
    raise RuntimeError("could not draw an instance with the requested gap")


def generate_linear_instance(n_arms, dim, seed, phi_low=0.2, phi_high=0.4,
                             instance_id=None):
    """Unit-norm feature rows drawn uniformly on the sphere and a
    parameter drawn uniformly from the box ``[phi_low, phi_high]^dim``;
    Gaussian observations."""
    rng = RngStream(seed, 202).generator()
    feats = rng.standard_normal((n_arms, dim))
    feats /= np.linalg.norm(feats, axis=1, keepdims=True)
    phi = rng.uniform(phi_low, phi_high, dim)
    theta = feats @ phi
    return BanditInstance(linear_structure(feats), gaussian_model(), theta,
                          instance_id or "linear-%d" % seed)


def generate_lipschitz_instance(n_arms, seed, lipschitz_const=1.0,
                                instance_id=None):
    """Arms on a uniform grid of [0, 1] with a bounded-increment walk for
    the means, so ``|theta(x) - theta(y)| <= L * |pos(x) - pos(y)|``."""
    rng = RngStream(seed, 303).generator()
    step = 1.0 / (n_arms - 1)
    pos = np.arange(n_arms) * step
    dist = lipschitz_const * np.abs(pos[:, None] - pos[None, :])
    theta = np.empty(n_arms)
    theta[0] = rng.uniform(0.3, 0.7)
    for i in range(1, n_arms):
        inc = rng.uniform(-lipschitz_const * step, lipschitz_const * step)
        theta[i] = min(0.95, max(0.05, theta[i - 1] + inc))
    return BanditInstance(lipschitz_structure(dist), bernoulli_model(),
                          theta, instance_id or "lipschitz-%d" % seed)


def generate_unimodal_instance(n_arms, seed, instance_id=None):
    """Strictly increasing means up to a random peak, strictly
    decreasing after; Bernoulli observations."""
    rng = RngStream(seed, 404).generator()
    for _ in range(1000):
        values = np.sort(rng.uniform(0.1, 0.9, n_arms))
        if np.min(np.diff(values)) <= 1e-6:
            continue
        peak = int(rng.integers(0, n_arms))
        left = values[:peak]  # already ascending
        right = values[peak:][::-1]
        theta = np.concatenate((left, right))
        return BanditInstance(unimodal_structure(n_arms), bernoulli_model(),
                              theta, instance_id or "unimodal-%d" % seed)
    raise RuntimeError("could not draw strictly unimodal means")


def generate_dueling_instance(n_items, seed, instance_id=None):
    """Pairwise-comparison matrix with a planted Condorcet winner."""
    rng = RngStream(seed, 505).generator()
    w = int(rng.integers(0, n_items))
    mat = np.full((n_items, n_items), 0.5)
    for i in range(n_items):
        for j in range(i + 1, n_items):
            if i == w:
                mat[i, j] = rng.uniform(0.55, 0.95)
            elif j == w:
                mat[i, j] = rng.uniform(0.05, 0.45)
            else:
                mat[i, j] = rng.uniform(0.05, 0.95)
            mat[j, i] = 1.0 - mat[i, j]
    return BanditInstance(dueling_structure(n_items), bernoulli_model(),
                          mat.ravel(), instance_id or "dueling-%d" % seed)
