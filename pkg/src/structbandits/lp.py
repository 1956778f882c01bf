"""Thin layer over the dense simplex kernel for the covering programs
used by the bound solvers: minimize a nonnegative cost subject to
``rows @ eta >= rhs`` and ``eta >= 0``.
"""

import dataclasses

import numpy as np

from . import _backend

__all__ = ["LpError", "LpInfeasibleError", "LpResult", "minimize_covering"]

_STATUS = {0: "optimal", 1: "infeasible", 2: "iteration_limit", 3: "unbounded"}


class LpError(RuntimeError):
    """LP solve failed (iteration limit or unbounded)."""


class LpInfeasibleError(LpError):
    """No nonnegative point satisfies the covering constraints."""


@dataclasses.dataclass
class LpResult:
    x: np.ndarray
    value: float
    status: str
    iterations: int
    max_violation: float


def minimize_covering(costs, rows, rhs, max_iter=0, backend=None):
    """Solve ``min costs @ eta  s.t.  rows @ eta >= rhs, eta >= 0``.

    Solved through the dual, ``max rhs @ y  s.t.  rows.T @ y <= costs,
    y >= 0``: with nonnegative costs it needs no feasibility phase, and
    its shadow prices are the optimal ``eta``.

    Returns an :class:`LpResult`; ``max_violation`` is the largest
    relative shortfall of the returned point, ``max(0, (rhs - rows@eta)
    / max(|rhs|, 1))``.  Raises :class:`LpInfeasibleError` or
    :class:`LpError` when the solve does not reach an optimum.
    """
    costs = np.ascontiguousarray(costs, dtype=np.float64)
    rows = np.ascontiguousarray(rows, dtype=np.float64)
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    if backend is None:
        backend = _backend
    if rows.shape[0] == 0:
        return LpResult(x=np.zeros(costs.shape[0]), value=0.0,
                        status="optimal", iterations=0, max_violation=0.0)
    cols = np.ascontiguousarray(rows.T)
    _, code, iters, x = backend.simplex_min(-rhs, cols, costs, max_iter)
    x = np.asarray(x, dtype=np.float64)
    if code == 3:
        # an unbounded dual certifies an infeasible primal
        raise LpInfeasibleError("covering constraints are infeasible")
    if code != 0:
        status = _STATUS.get(code, "unknown")
        raise LpError("LP solve failed with status %s" % status)
    status = "optimal"
    if rows.shape[0]:
        shortfall = rhs - rows @ x
        rel = shortfall / np.maximum(np.abs(rhs), 1.0)
        max_violation = float(max(0.0, np.max(rel)))
    else:
        max_violation = 0.0
    return LpResult(x=x, value=float(costs @ x), status=status,
                    iterations=int(iters), max_violation=max_violation)
