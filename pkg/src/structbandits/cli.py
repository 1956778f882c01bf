"""Command line entry point.

Subcommands:

* ``solve-bound``: read one instance description from a JSON config,
  print (or write) the minimal exploration rates and the bound value.
* ``run``: run a Monte-Carlo experiment described by a JSON config and
  write per-episode and aggregate regret CSVs.
* ``selfcheck``: run the bundled health checks; nonzero exit on any
  failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from .bound_solver import SolveOptions, solve, solve_generic_oracle
from .core import BERNOULLI, GAUSSIAN, bernoulli_model, gaussian_model
from .harness import (
    BanditInstance,
    PolicySpec,
    default_checkpoints,
    generate_classical_instance,
    generate_dueling_instance,
    generate_linear_instance,
    generate_lipschitz_instance,
    generate_unimodal_instance,
    run_monte_carlo,
    write_aggregate_csv,
    write_traces_csv,
)
from .structures import (
    classical_structure,
    dueling_structure,
    linear_structure,
    lipschitz_structure,
    unimodal_structure,
)

__all__ = ["main"]


def _model_from_name(name):
    if name in (None, "bernoulli"):
        return bernoulli_model()
    if name == "gaussian":
        return gaussian_model()
    raise ValueError("unknown observation model %r" % (name,))


def _instance_from_config(cfg, index=0):
    """Build one explicit instance from its JSON description."""
    kind = cfg.get("kind")
    model = _model_from_name(cfg.get("model"))
    iid = cfg.get("instance_id", "%s-%d" % (kind, index))
    if kind == "classical":
        theta = np.asarray(cfg["theta"], dtype=np.float64)
        return BanditInstance(classical_structure(theta.shape[0]), model,
                              theta, iid)
    if kind == "unimodal":
        theta = np.asarray(cfg["theta"], dtype=np.float64)
        return BanditInstance(unimodal_structure(theta.shape[0]), model,
                              theta, iid)
    if kind == "linear":
        feats = np.asarray(cfg["features"], dtype=np.float64)
        if "theta" in cfg:
            theta = np.asarray(cfg["theta"], dtype=np.float64)
        else:
            theta = feats @ np.asarray(cfg["phi"], dtype=np.float64)
        model = _model_from_name(cfg.get("model", "gaussian"))
        return BanditInstance(linear_structure(feats), model, theta, iid)
    if kind == "lipschitz":
        dist = np.asarray(cfg["distances"], dtype=np.float64)
        theta = np.asarray(cfg["theta"], dtype=np.float64)
        return BanditInstance(lipschitz_structure(dist), model, theta, iid)
    if kind == "dueling":
        if "matrix" in cfg:
            theta = np.asarray(cfg["matrix"], dtype=np.float64).ravel()
        else:
            theta = np.asarray(cfg["theta"], dtype=np.float64)
        n_items = int(cfg.get("n_items", round(np.sqrt(theta.shape[0]))))
        return BanditInstance(dueling_structure(n_items), model, theta, iid)
    raise ValueError("unknown structure kind %r" % (kind,))


_GENERATORS = {
    "classical": lambda cfg, seed, i: generate_classical_instance(
        cfg.get("n_arms", 5),
        BERNOULLI if cfg.get("model", "bernoulli") == "bernoulli"
        else GAUSSIAN,
        seed + i, min_gap=cfg.get("min_gap", 0.0),
        instance_id="classical-%d" % i),
    "linear": lambda cfg, seed, i: generate_linear_instance(
        cfg.get("n_arms", 20), cfg.get("dim", 3), seed + i,
        phi_low=cfg.get("phi_low", 0.2), phi_high=cfg.get("phi_high", 0.4),
        instance_id="linear-%d" % i),
    "lipschitz": lambda cfg, seed, i: generate_lipschitz_instance(
        cfg.get("n_arms", 6), seed + i,
        lipschitz_const=cfg.get("lipschitz_const", 1.0),
        instance_id="lipschitz-%d" % i),
    "unimodal": lambda cfg, seed, i: generate_unimodal_instance(
        cfg.get("n_arms", 5), seed + i, instance_id="unimodal-%d" % i),
    "dueling": lambda cfg, seed, i: generate_dueling_instance(
        cfg.get("n_items", 3), seed + i, instance_id="dueling-%d" % i),
}


def _instances_from_config(cfg, seed):
    if isinstance(cfg, list):
        return [_instance_from_config(c, i) for i, c in enumerate(cfg)]
    if "count" in cfg:
        gen = _GENERATORS.get(cfg.get("kind"))
        if gen is None:
            raise ValueError("no generator for kind %r" % (cfg.get("kind"),))
        return [gen(cfg, seed, i) for i in range(int(cfg["count"]))]
    return [_instance_from_config(cfg, 0)]


def _load_config(path):
    with open(path) as fh:
        return json.load(fh)


def _solve_options(cfg):
    kwargs = {k: cfg[k] for k in
              ("c_max", "tol", "max_iter", "ridge", "oracle_resolution")
              if k in cfg}
    return SolveOptions(**kwargs)


def _cmd_solve_bound(args):
    cfg = _load_config(args.config)
    instance = _instance_from_config(cfg.get("instance", cfg))
    options = _solve_options(cfg.get("solver", {}))
    if cfg.get("method") == "oracle":
        sol = solve_generic_oracle(instance.structure, instance.model,
                                   instance.theta,
                                   resolution=options.oracle_resolution,
                                   c_max=options.c_max)
    else:
        sol = solve(instance.structure, instance.model, instance.theta,
                    options=options)
    payload = {
        "instance_id": instance.instance_id,
        "value": sol.value,
        "rates": [float(v) for v in sol.rates],
        "status": sol.status,
        "iterations": sol.iterations,
        "max_violation": sol.max_violation,
        "diagnostics": {k: (int(v) if isinstance(v, (int, np.integer))
                            else v)
                        for k, v in sol.diagnostics.items()},
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _check_epsilon_gate(policies, allow_epsilon_zero):
    """A zero estimation floor disables forced estimation rounds, which
    can stall learning on some instances; require an explicit opt-in."""
    for spec in policies:
        if spec.name not in ("ossb", "static_alloc"):
            continue
        eps = spec.params.get("epsilon")
        if eps is not None and float(eps) == 0.0 and not allow_epsilon_zero:
            raise SystemExit(
                "policy %r sets epsilon=0; pass --allow-epsilon-zero to "
                "confirm" % spec.name)


def _cmd_run(args):
    cfg = _load_config(args.config)
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    horizon = int(cfg["horizon"])
    n_trials = int(cfg.get("n_trials", 1))
    checkpoints = cfg.get("checkpoints")
    policies = [PolicySpec(p["name"], p.get("params", {}))
                for p in cfg["policies"]]
    _check_epsilon_gate(policies, args.allow_epsilon_zero)
    instances = _instances_from_config(cfg["instances"], seed)

    traces, aggregates, failures = run_monte_carlo(
        instances, policies, horizon, n_trials, seed,
        parallelism=args.parallelism, checkpoints=checkpoints)

    os.makedirs(args.out, exist_ok=True)
    traces_path = os.path.join(args.out, "traces.csv")
    agg_path = os.path.join(args.out, "aggregate.csv")
    write_traces_csv(traces_path, traces, seed=seed)
    write_aggregate_csv(agg_path, aggregates, seed=seed)
    print("wrote %s and %s (%d episodes, %d failures)"
          % (traces_path, agg_path, len(traces), len(failures)))
    for key, tb in failures:
        print("episode %r failed:\n%s" % (key, tb), file=sys.stderr)
    return 1 if failures else 0


def _cmd_selfcheck(args):
    from .selfcheck import format_results, run_selfcheck
    results, all_ok = run_selfcheck(inject_failure=args.inject_failure)
    print(format_results(results))
    print("selfcheck: %d/%d checks passed"
          % (sum(r.ok for r in results), len(results)))
    return 0 if all_ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="structbandits",
        description="Exploration lower bounds and rate-matching policies "
                    "for structured bandits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve-bound",
                             help="solve one instance's exploration rates")
    p_solve.add_argument("--config", required=True,
                         help="JSON file describing the instance")
    p_solve.add_argument("--out", default=None,
                         help="write the JSON result here instead of stdout")
    p_solve.set_defaults(fn=_cmd_solve_bound)

    p_run = sub.add_parser("run", help="run a Monte-Carlo experiment")
    p_run.add_argument("--config", required=True,
                       help="JSON experiment description")
    p_run.add_argument("--out", required=True,
                       help="output directory for traces.csv/aggregate.csv")
    p_run.add_argument("--parallelism", type=int, default=1,
                       help="worker processes (results are identical for "
                            "any value)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config's seed")
    p_run.add_argument("--allow-epsilon-zero", action="store_true",
                       help="permit policies configured with epsilon=0")
    p_run.set_defaults(fn=_cmd_run)

    p_check = sub.add_parser("selfcheck", help="run bundled health checks")
    p_check.add_argument("--inject-failure", action="store_true",
                         help=argparse.SUPPRESS)
    p_check.set_defaults(fn=_cmd_selfcheck)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
