# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: divergence scalars, a dense LP primitive, and the
fast episode loop for structures with closed-form exploration rates.

Mirror of ``structbandits._kernels_py``.  Both backends perform the same
arithmetic in the same order (libm scalars, identical pivot and
tie-break rules) so results are bit-identical.  Keep the two in sync;
``tests/test_backend_parity.py`` enforces it.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, log

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline double _kl_bern(double p, double q) nogil:
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return INFINITY
    if p <= 0.0:
        return -log(1.0 - q)
    if p >= 1.0:
        return -log(q)
    return p * log(p / q) + (1.0 - p) * log((1.0 - p) / (1.0 - q))


cdef inline double _kl_gauss(double p, double q) nogil:
    cdef double d = p - q
    return 0.5 * d * d


def kl_bernoulli(double p, double q):
    """KL divergence between Bernoulli(p) and Bernoulli(q), in nats."""
    return _kl_bern(p, q)


def kl_gaussian(double p, double q):
    """KL divergence between unit-variance Gaussians with means p and q."""
    return _kl_gauss(p, q)


cdef void _pivot(double[:, ::1] T, double[::1] obj, long[::1] basis,
                 Py_ssize_t leave, Py_ssize_t enter, Py_ssize_t m,
                 Py_ssize_t w) nogil:
    # Normalizing first makes the pivot entry exactly 1.0, so the
    # eliminated entries below come out exactly 0.0 in IEEE arithmetic.
    cdef double piv = T[leave, enter]
    cdef double f
    cdef Py_ssize_t i, j
    for j in range(w):
        T[leave, j] /= piv
    for i in range(m):
        if i == leave:
            continue
        f = T[i, enter]
        if f != 0.0:
            for j in range(w):
                T[i, j] -= f * T[leave, j]
    f = obj[enter]
    if f != 0.0:
        for j in range(w):
            obj[j] -= f * T[leave, j]
    basis[leave] = enter


cdef int _pivot_loop(double[:, ::1] T, double[::1] obj, long[::1] basis,
                     long[::1] active, long[::1] banned, Py_ssize_t m,
                     Py_ssize_t n, Py_ssize_t ncols, long max_iter,
                     long* iters) nogil:
    # Dantzig entering rule until the objective stalls for 50 pivots,
    # then permanently Bland's rule, which cannot cycle.
    cdef Py_ssize_t enter, leave, i, j
    cdef double a, r, best, best_c, cmax, thresh, cur, prev
    cdef double eps = 1e-9
    cdef int bland = 0
    cdef int stall = 0
    prev = obj[ncols]
    for j in range(n + m):
        banned[j] = 0
    while True:
        if iters[0] >= max_iter:
            return 2
        while True:
            enter = -1
            if bland:
                for j in range(n + m):
                    if banned[j] == 0 and obj[j] < -eps:
                        enter = j
                        break
            else:
                best_c = -eps
                for j in range(n + m):
                    if banned[j] == 0 and obj[j] < best_c:
                        best_c = obj[j]
                        enter = j
            if enter < 0:
                return 0
            cmax = 0.0
            for i in range(m):
                if active[i] != 0 and T[i, enter] > cmax:
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
        best = INFINITY
        for i in range(m):
            if active[i] == 0:
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
        _pivot(T, obj, basis, leave, enter, m, ncols + 1)
        iters[0] += 1
        for j in range(n + m):
            banned[j] = 0
        if bland == 0:
            cur = obj[ncols]
            if cur == prev:
                stall += 1
                if stall >= 50:
                    bland = 1
            else:
                stall = 0
                prev = cur


def simplex_min(c_in, A_in, b_in, long max_iter=0):
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
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c = \
        np.ascontiguousarray(c_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = \
        np.ascontiguousarray(A_in, dtype=np.float64).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = \
        np.ascontiguousarray(b_in, dtype=np.float64).copy()
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    if max_iter <= 0:
        max_iter = 1000 + 50 * (m + n)
    cdef double eps = 1e-9
    cdef Py_ssize_t i, j, aj, enter
    cdef double s, v, f

    cdef cnp.ndarray[cnp.float64_t, ndim=1] scale_arr = \
        np.ones(m, dtype=np.float64)
    cdef double[::1] scale = scale_arr
    cdef double[:, ::1] Av = A
    cdef double[::1] bv = b
    for i in range(m):
        s = 0.0
        for j in range(n):
            if fabs(Av[i, j]) > s:
                s = fabs(Av[i, j])
        if s > 0.0:
            for j in range(n):
                Av[i, j] /= s
            bv[i] = bv[i] / s
            scale[i] = s

    cdef Py_ssize_t n_art = 0
    for i in range(m):
        if bv[i] < 0.0:
            n_art += 1
    cdef Py_ssize_t ncols = n + m + n_art

    cdef cnp.ndarray[cnp.float64_t, ndim=2] T_arr = \
        np.zeros((m, ncols + 1), dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] basis_arr = \
        np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] active_arr = \
        np.ones(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] banned_arr = \
        np.zeros(n + m, dtype=np.int64)
    cdef double[:, ::1] T = T_arr
    cdef long[::1] basis = basis_arr
    cdef long[::1] active = active_arr
    cdef long[::1] banned = banned_arr

    aj = 0
    for i in range(m):
        if bv[i] < 0.0:
            for j in range(n):
                T[i, j] = -Av[i, j]
            T[i, n + i] = -1.0
            T[i, n + m + aj] = 1.0
            T[i, ncols] = -bv[i]
            basis[i] = n + m + aj
            aj += 1
        else:
            for j in range(n):
                T[i, j] = Av[i, j]
            T[i, n + i] = 1.0
            T[i, ncols] = bv[i]
            basis[i] = n + i

    cdef long iters = 0
    cdef int st
    cdef cnp.ndarray[cnp.float64_t, ndim=1] obj_arr
    cdef double[::1] obj
    cdef cnp.ndarray[cnp.float64_t, ndim=1] duals_arr = \
        np.zeros(m, dtype=np.float64)
    cdef double[::1] duals = duals_arr

    if n_art > 0:
        obj_arr = np.zeros(ncols + 1, dtype=np.float64)
        obj = obj_arr
        for j in range(n + m, ncols):
            obj[j] = 1.0
        for i in range(m):
            if basis[i] >= n + m:
                for j in range(ncols + 1):
                    obj[j] -= T[i, j]
        st = _pivot_loop(T, obj, basis, active, banned, m, n, ncols,
                         max_iter, &iters)
        if st != 0:
            return np.zeros(n), st, iters, duals_arr
        if obj[ncols] < -1e-7:
            return np.zeros(n), 1, iters, duals_arr
        # Drive surviving artificial basics out; redundant rows go inert.
        for i in range(m):
            if basis[i] >= n + m:
                enter = -1
                for j in range(n + m):
                    if fabs(T[i, j]) > eps:
                        enter = j
                        break
                if enter >= 0:
                    _pivot(T, obj, basis, i, enter, m, ncols + 1)
                    iters += 1
                else:
                    active[i] = 0

    obj_arr = np.zeros(ncols + 1, dtype=np.float64)
    obj = obj_arr
    for j in range(n):
        obj[j] = c[j]
    for i in range(m):
        if active[i] and basis[i] < n and obj[basis[i]] != 0.0:
            f = obj[basis[i]]
            for j in range(ncols + 1):
                obj[j] -= f * T[i, j]
    st = _pivot_loop(T, obj, basis, active, banned, m, n, ncols,
                     max_iter, &iters)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.zeros(n, dtype=np.float64)
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
    return x, st, iters, duals_arr


def run_rate_matching_episode(int model_kind, int neighbor_only,
                              theta_in, gaps_in, noise_in,
                              long horizon, double epsilon, double gamma,
                              double c_max, checkpoints_in):
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
    cdef cnp.ndarray[cnp.float64_t, ndim=1] theta = \
        np.ascontiguousarray(theta_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gaps = \
        np.ascontiguousarray(gaps_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] noise = \
        np.ascontiguousarray(noise_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] checkpoints = \
        np.ascontiguousarray(checkpoints_in, dtype=np.int64)
    cdef Py_ssize_t n_arms = theta.shape[0]
    cdef Py_ssize_t n_cp = checkpoints.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] counts = \
        np.zeros(n_arms, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] means = \
        np.zeros(n_arms, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rates = \
        np.zeros(n_arms, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] regret_cp = \
        np.zeros(n_cp, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] phase_cp = \
        np.zeros((n_cp, 4), dtype=np.int64)
    cdef long[4] phases
    phases[0] = 0
    phases[1] = 0
    phases[2] = 0
    phases[3] = 0
    cdef long s = 0
    cdef double cum = 0.0
    cdef Py_ssize_t icp = 0
    cdef double gfac = 1.0 + gamma

    cdef double[::1] th = theta
    cdef double[::1] gp = gaps
    cdef double[::1] nz = noise
    cdef long[::1] cp = checkpoints
    cdef double[::1] cnt = counts
    cdef double[::1] mn = means
    cdef double[::1] rt = rates

    cdef long t
    cdef Py_ssize_t arm, tag, xs, x, xu, xb, p
    cdef double lnt, cx, dv, r, best, y
    cdef bint all_ok

    for t in range(1, horizon + 1):
        if t <= <long>n_arms:
            arm = t - 1
            tag = 0
        else:
            xs = 0
            for x in range(1, n_arms):
                if mn[x] > mn[xs]:
                    xs = x
            lnt = log(<double>t)
            all_ok = True
            for x in range(n_arms):
                if x == xs:
                    cx = 0.0
                elif neighbor_only and (x - xs != 1 and xs - x != 1):
                    cx = 0.0
                else:
                    if model_kind == 0:
                        dv = _kl_bern(mn[x], mn[xs])
                    else:
                        dv = _kl_gauss(mn[x], mn[xs])
                    if dv <= 0.0:
                        cx = c_max
                    elif dv == INFINITY:
                        cx = 0.0
                    else:
                        cx = 1.0 / dv
                        if cx > c_max:
                            cx = c_max
                rt[x] = cx
                if cnt[x] < cx * gfac * lnt:
                    all_ok = False
            if all_ok:
                arm = xs
                tag = 1
            else:
                s += 1
                xu = 0
                for x in range(1, n_arms):
                    if cnt[x] < cnt[xu]:
                        xu = x
                if cnt[xu] <= epsilon * s:
                    arm = xu
                    tag = 2
                else:
                    xb = -1
                    best = INFINITY
                    for x in range(n_arms):
                        if rt[x] > 0.0:
                            r = cnt[x] / rt[x]
                            if xb < 0 or r < best:
                                xb = x
                                best = r
                    arm = xb
                    tag = 3
        if model_kind == 0:
            y = 1.0 if nz[t - 1] < th[arm] else 0.0
        else:
            y = th[arm] + nz[t - 1]
        mn[arm] = (mn[arm] * cnt[arm] + y) / (cnt[arm] + 1.0)
        cnt[arm] += 1.0
        cum += gp[arm]
        phases[tag] += 1
        if icp < n_cp and t == cp[icp]:
            regret_cp[icp] = cum
            for p in range(4):
                phase_cp[icp, p] = phases[p]
            icp += 1

    return (regret_cp, phase_cp, counts.astype(np.int64),
            means, s)
