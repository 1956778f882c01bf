"""Pure-Python kernels: divergence scalars, a dense LP primitive, and the
fast episode loop for structures with closed-form exploration rates.

This module is the reference twin of the compiled extension
``structbandits._kernels``.  Both implement the same arithmetic in the
same order (scalar libm calls, identical pivot and tie-break rules) so
that results are bit-identical regardless of which backend is active.
Keep the two in sync; ``tests/test_backend_parity.py`` enforces it.
"""

import math

import numpy as np

BACKEND_NAME = "pure"

_INF = math.inf


def kl_bernoulli(p, q):
    """KL divergence between Bernoulli(p) and Bernoulli(q), in nats."""
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return _INF
    if p <= 0.0:
        return -math.log(1.0 - q)
    if p >= 1.0:
        return -math.log(q)
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


def kl_gaussian(p, q):
    """KL divergence between unit-variance Gaussians with means p and q."""
    d = p - q
    return 0.5 * d * d


def simplex_min(c, A, b, max_iter=0):
    """Minimize ``c @ x`` subject to ``A @ x <= b`` and ``x >= 0``.

    Dense two-phase tableau simplex.  Entering variable: most negative
    reduced cost (lowest index on ties), falling back permanently to
    Bland's anti-cycling rule once the objective stalls for 50 pivots.
    Leaving row: minimum ratio with lowest basic-variable index on ties.

    Returns ``(x, status, iterations, duals)`` with status 0 = optimal,
    1 = infeasible, 2 = iteration limit, 3 = unbounded.  ``duals`` holds
    the nonnegative shadow prices of the rows (the rate at which the
    optimal value falls per unit increase of ``b[i]``); it is all zeros
    unless status is 0.  ``max_iter <= 0`` selects an automatic budget.
    """
    c = np.ascontiguousarray(c, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    m, n = A.shape
    if max_iter <= 0:
        max_iter = 1000 + 50 * (m + n)
    eps = 1e-9

    # Row scaling only (column scaling would rescale the solution).
    A = A.copy()
    b = b.copy()
    scale = np.ones(m, dtype=np.float64)
    for i in range(m):
        s = float(np.max(np.abs(A[i])))
        if s > 0.0:
            A[i] /= s
            b[i] = b[i] / s
            scale[i] = s

    n_art = int(np.sum(b < 0.0))
    ncols = n + m + n_art
    T = np.zeros((m, ncols + 1), dtype=np.float64)
    basis = np.empty(m, dtype=np.int64)
    aj = 0
    for i in range(m):
        if b[i] < 0.0:
            T[i, :n] = -A[i]
            T[i, n + i] = -1.0
            T[i, n + m + aj] = 1.0
            T[i, ncols] = -b[i]
            basis[i] = n + m + aj
            aj += 1
        else:
            T[i, :n] = A[i]
            T[i, n + i] = 1.0
            T[i, ncols] = b[i]
            basis[i] = n + i

    active = np.ones(m, dtype=np.int64)
    iters = 0

    banned = np.zeros(n + m, dtype=np.int64)

    def pivot_loop(obj):
        # Dantzig entering rule until the objective stalls for 50 pivots,
        # then permanently Bland's rule, which cannot cycle.
        nonlocal iters
        bland = False
        stall = 0
        prev = obj[ncols]
        banned[:] = 0
        while True:
            if iters >= max_iter:
                return 2
            while True:
                enter = -1
                if bland:
                    for j in range(n + m):
                        if not banned[j] and obj[j] < -eps:
                            enter = j
                            break
                else:
                    best_c = -eps
                    for j in range(n + m):
                        if not banned[j] and obj[j] < best_c:
                            best_c = obj[j]
                            enter = j
                if enter < 0:
                    return 0
                cmax = 0.0
                for i in range(m):
                    if active[i] and T[i, enter] > cmax:
                        cmax = T[i, enter]
                if cmax <= 0.0:
                    return 3
                if cmax <= 1e-13:
                    # rows are scaled to unit max, so a column whose
                    # positive part is this small is elimination noise;
                    # pivoting on it would wreck the tableau
                    banned[enter] = 1
                    continue
                break
            # Pivot tolerance relative to the column's largest entry:
            # entries many orders smaller are elimination noise, and an
            # absolute cutoff would misread them as an unbounded ray.
            thresh = cmax * 1e-11
            leave = -1
            best = _INF
            for i in range(m):
                if not active[i]:
                    continue
                a = T[i, enter]
                if a > thresh:
                    r = T[i, ncols] / a
                    if leave < 0:
                        leave = i
                        best = r
                    elif r < best:
                        leave = i
                        best = r
                    elif r == best and basis[i] < basis[leave]:
                        leave = i
            _pivot(T, obj, basis, leave, enter)
            iters += 1
            banned[:] = 0
            if not bland:
                cur = obj[ncols]
                if cur == prev:
                    stall += 1
                    if stall >= 50:
                        bland = True
                else:
                    stall = 0
                    prev = cur

    duals = np.zeros(m, dtype=np.float64)
    if n_art > 0:
        obj = np.zeros(ncols + 1, dtype=np.float64)
        obj[n + m:ncols] = 1.0
        for i in range(m):
            if basis[i] >= n + m:
                obj -= T[i]
        st = pivot_loop(obj)
        if st != 0:
            return np.zeros(n), st, iters, duals
        if obj[ncols] < -1e-7:
            return np.zeros(n), 1, iters, duals
        # Drive surviving artificial basics out; redundant rows go inert.
        for i in range(m):
            if basis[i] >= n + m:
                enter = -1
                for j in range(n + m):
                    if abs(T[i, j]) > eps:
                        enter = j
                        break
                if enter >= 0:
                    _pivot(T, obj, basis, i, enter)
                    iters += 1
                else:
                    active[i] = 0

    obj = np.zeros(ncols + 1, dtype=np.float64)
    obj[:n] = c
    for i in range(m):
        if active[i] and basis[i] < n and obj[basis[i]] != 0.0:
            obj -= obj[basis[i]] * T[i]
    st = pivot_loop(obj)

    x = np.zeros(n, dtype=np.float64)
    for i in range(m):
        if active[i] and basis[i] < n:
            v = T[i, ncols]
            x[basis[i]] = v if v > 0.0 else 0.0
    if st == 0:
        # Reduced cost of row i's slack, undone for the row scaling,
        # is that row's shadow price.
        for i in range(m):
            v = obj[n + i]
            duals[i] = v / scale[i] if v > 0.0 else 0.0
    return x, st, iters, duals


def _pivot(T, obj, basis, leave, enter):
    # Normalizing first makes the pivot entry exactly 1.0, so the
    # eliminated entries below come out exactly 0.0 in IEEE arithmetic.
    piv = T[leave, enter]
    T[leave] /= piv
    pivrow = T[leave].copy()
    factors = T[:, enter].copy()
    T -= np.outer(factors, pivrow)
    T[leave] = pivrow
    f = obj[enter]
    if f != 0.0:
        obj -= f * pivrow
    basis[leave] = enter


def run_rate_matching_episode(model_kind, neighbor_only, theta, gaps, noise,
                              horizon, epsilon, gamma, c_max, checkpoints):
    """One full episode of the rate-matching sampling rule for structures
    whose minimal exploration rates have the closed form
    ``c(x) = w(x) / kl(mean(x), mean(best))``.

    ``model_kind``: 0 Bernoulli (``noise`` holds uniforms), 1 Gaussian
    (``noise`` holds standard normals).  ``neighbor_only``: 1 restricts
    positive rates to arms adjacent to the incumbent on the line graph,
    0 gives every suboptimal arm weight 1.

    Returns ``(regret_at_cp, phase_at_cp, final_counts, final_means, s)``
    where ``phase_at_cp`` rows hold cumulative round tallies in the order
    init, exploit, estimate, explore.
    """
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    gaps = np.ascontiguousarray(gaps, dtype=np.float64)
    noise = np.ascontiguousarray(noise, dtype=np.float64)
    checkpoints = np.ascontiguousarray(checkpoints, dtype=np.int64)
    n_arms = theta.shape[0]
    n_cp = checkpoints.shape[0]

    counts = np.zeros(n_arms, dtype=np.float64)
    means = np.zeros(n_arms, dtype=np.float64)
    rates = np.zeros(n_arms, dtype=np.float64)
    regret_cp = np.zeros(n_cp, dtype=np.float64)
    phase_cp = np.zeros((n_cp, 4), dtype=np.int64)
    phases = [0, 0, 0, 0]
    s = 0
    cum = 0.0
    icp = 0
    gfac = 1.0 + gamma

    for t in range(1, horizon + 1):
        if t <= n_arms:
            arm = t - 1
            tag = 0
        else:
            xs = 0
            for x in range(1, n_arms):
                if means[x] > means[xs]:
                    xs = x
            lnt = math.log(t)
            all_ok = True
            for x in range(n_arms):
                if x == xs:
                    cx = 0.0
                elif neighbor_only and abs(x - xs) != 1:
                    cx = 0.0
                else:
                    if model_kind == 0:
                        dv = kl_bernoulli(means[x], means[xs])
                    else:
                        dv = kl_gaussian(means[x], means[xs])
                    if dv <= 0.0:
                        cx = c_max
                    elif dv == _INF:
                        cx = 0.0
                    else:
                        cx = 1.0 / dv
                        if cx > c_max:
                            cx = c_max
                rates[x] = cx
                if counts[x] < cx * gfac * lnt:
                    all_ok = False
            if all_ok:
                arm = xs
                tag = 1
            else:
                s += 1
                xu = 0
                for x in range(1, n_arms):
                    if counts[x] < counts[xu]:
                        xu = x
                if counts[xu] <= epsilon * s:
                    arm = xu
                    tag = 2
                else:
                    xb = -1
                    best = _INF
                    for x in range(n_arms):
                        if rates[x] > 0.0:
                            r = counts[x] / rates[x]
                            if xb < 0 or r < best:
                                xb = x
                                best = r
                    arm = xb
                    tag = 3
        if model_kind == 0:
            y = 1.0 if noise[t - 1] < theta[arm] else 0.0
        else:
            y = theta[arm] + noise[t - 1]
        means[arm] = (means[arm] * counts[arm] + y) / (counts[arm] + 1.0)
        counts[arm] += 1.0
        cum += gaps[arm]
        phases[tag] += 1
        if icp < n_cp and t == checkpoints[icp]:
            regret_cp[icp] = cum
            for p in range(4):
                phase_cp[icp, p] = phases[p]
            icp += 1

    return (regret_cp, phase_cp, counts.astype(np.int64),
            means, s)
