"""Structure families over the arm set and the operations every solver
and sampling rule needs: reward extraction, best-arm identification, gap
vectors, and projection of raw estimates onto the structure.

Arms are integer indices.  Dueling structures index the ordered pair
``(i, j)`` of a size-``n`` item set as ``i*n + j``; the mean of pair
``(i, j)`` is the probability that item ``i`` beats item ``j``, with
``theta[i*n + i] == 0.5`` and ``theta[i*n + j] == 1 - theta[j*n + i]``.
"""

import dataclasses

import numpy as np

from .core import as_means

__all__ = [
    "CLASSICAL",
    "LINEAR",
    "LIPSCHITZ",
    "UNIMODAL",
    "DUELING",
    "StructureModel",
    "NoCondorcetWinnerError",
    "RankDeficientError",
    "classical_structure",
    "linear_structure",
    "lipschitz_structure",
    "unimodal_structure",
    "dueling_structure",
    "reward",
    "optimal_arm",
    "gap_vector",
    "project_to_structure",
    "condorcet_winner",
    "pair_index",
    "index_pair",
    "validate_dueling_means",
    "is_unimodal",
    "lipschitz_violation",
]

CLASSICAL = "classical"
LINEAR = "linear"
LIPSCHITZ = "lipschitz"
UNIMODAL = "unimodal"
DUELING = "dueling"


class NoCondorcetWinnerError(ValueError):
    """No item beats every other item strictly."""


class RankDeficientError(ValueError):
    """The weighted feature Gram matrix is numerically singular."""


@dataclasses.dataclass(frozen=True)
class StructureModel:
    """One of the five supported structure families.

    ``n_arms`` is always the number of playable arms; for dueling
    structures that is ``n_items**2`` ordered pairs.  ``features`` is the
    (n_arms, d) design for linear structures, ``distances`` the (n, n)
    pseudo-metric for Lipschitz structures.
    """

    kind: str
    n_arms: int
    features: np.ndarray = None
    distances: np.ndarray = None
    n_items: int = 0

    @property
    def dim(self):
        return 0 if self.features is None else self.features.shape[1]


def classical_structure(n_arms):
    if n_arms < 2:
        raise ValueError("need at least two arms")
    return StructureModel(CLASSICAL, int(n_arms))


def linear_structure(features):
    feats = np.ascontiguousarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] < 2:
        raise ValueError("features must be (n_arms, d) with n_arms >= 2")
    if not np.all(np.isfinite(feats)):
        raise ValueError("features must be finite")
    return StructureModel(LINEAR, feats.shape[0], features=feats)


def lipschitz_structure(distances):
    dist = np.ascontiguousarray(distances, dtype=np.float64)
    n = dist.shape[0]
    if dist.ndim != 2 or dist.shape[1] != n or n < 2:
        raise ValueError("distances must be square with n >= 2")
    if np.any(dist < 0) or np.any(np.diag(dist) != 0):
        raise ValueError("distances must be nonnegative with zero diagonal")
    if not np.allclose(dist, dist.T, atol=1e-12):
        raise ValueError("distances must be symmetric")
    return StructureModel(LIPSCHITZ, n, distances=dist)


def unimodal_structure(n_arms):
    if n_arms < 2:
        raise ValueError("need at least two arms")
    return StructureModel(UNIMODAL, int(n_arms))


def dueling_structure(n_items):
    if n_items < 2:
        raise ValueError("need at least two items")
    return StructureModel(DUELING, int(n_items) ** 2, n_items=int(n_items))


def pair_index(i, j, n_items):
    return i * n_items + j

def index_pair(arm, n_items):
    return divmod(arm, n_items)


def validate_dueling_means(theta, n_items, tol=1e-9):
    """Check length, diagonal 0.5, and complement symmetry
    ``theta[(i, j)] == 1 - theta[(j, i)]``."""
    theta = as_means(theta)
    if theta.shape[0] != n_items * n_items:
        raise ValueError("dueling means must have length n_items**2")
    mat = theta.reshape(n_items, n_items)
    if np.any(np.abs(np.diag(mat) - 0.5) > tol):
        raise ValueError("self-comparison means must equal 0.5")
    if np.any(np.abs(mat + mat.T - 1.0) > tol):
        raise ValueError("means must satisfy theta(i,j) = 1 - theta(j,i)")
    return mat


def condorcet_winner(theta, n_items, require=False):
    """Item beating every other item strictly, or a flagged fallback.

    Returns ``(winner, strict)``.  When no strict winner exists and
    ``require`` is False, falls back to the item with the most pairwise
    wins (lowest index on ties) and reports ``strict=False``; with
    ``require=True`` it raises :class:`NoCondorcetWinnerError` instead.
    """
    mat = as_means(theta).reshape(n_items, n_items)
    for i in range(n_items):
        row = np.delete(mat[i], i)
        if np.all(row > 0.5):
            return i, True
    if require:
        raise NoCondorcetWinnerError("no item beats every other item")
    wins = (mat > 0.5).sum(axis=1)
    return int(np.argmax(wins)), False


def _dueling_rewards(theta, n_items):
    # reward((i, j)) = -(theta(w, i) + theta(w, j) - 1) / 2: zero at the
    # pair (w, w), nonpositive elsewhere when w is a strict winner.
    mat = as_means(theta).reshape(n_items, n_items)
    w, _ = condorcet_winner(theta, n_items)
    loss = mat[w] - 0.5
    return -0.5 * (loss[:, None] + loss[None, :]).ravel(), w


def reward(structure, arm, theta):
    """Expected reward of ``arm`` under ``theta``.

    For the four value-based structures this is ``theta[arm]``.  For
    dueling structures it is the regret-per-round form
    ``-(theta(w,i) + theta(w,j) - 1)/2`` for arm ``(i, j)``, which is 0
    at the best arm ``(w, w)`` and negative elsewhere.
    """
    theta = as_means(theta)
    if structure.kind == DUELING:
        rewards, _ = _dueling_rewards(theta, structure.n_items)
        return float(rewards[arm])
    return float(theta[arm])


def optimal_arm(structure, theta):
    """Best arm index; ties resolve to the lowest index.

    Dueling structures return the self-pair ``(w, w)`` of the Condorcet
    winner (fallback winner when none is strict, so callers acting on
    estimates always get an arm).
    """
    theta = as_means(theta)
    if structure.kind == DUELING:
        w, _ = condorcet_winner(theta, structure.n_items)
        return pair_index(w, w, structure.n_items)
    return int(np.argmax(theta))


def gap_vector(structure, theta):
    """Reward gaps ``reward(best) - reward(x)`` for every arm.

    Nonnegative whenever the structure's best-arm assumption holds for
    ``theta``; entries can go negative for dueling fallback winners on
    inconsistent estimates.
    """
    theta = as_means(theta)
    if structure.kind == DUELING:
        rewards, w = _dueling_rewards(theta, structure.n_items)
        best = rewards[pair_index(w, w, structure.n_items)]
        return best - rewards
    return theta[int(np.argmax(theta))] - theta


def project_to_structure(structure, raw_means, weights=None):
    """Project raw per-arm estimates onto the structure family.

    Linear: weighted least squares onto the span of the features
    (weights default to 1; raises :class:`RankDeficientError` when the
    weighted Gram matrix is singular).  Dueling: symmetrization
    ``theta(i,j) <- (m(i,j) + 1 - m(j,i))/2`` with the diagonal pinned
    at 0.5.  Classical, Lipschitz, and unimodal: identity.
    """
    raw = as_means(raw_means)
    if raw.shape[0] != structure.n_arms:
        raise ValueError("estimate length does not match arm count")
    if structure.kind == LINEAR:
        feats = structure.features
        w = np.ones(raw.shape[0]) if weights is None else \
            np.ascontiguousarray(weights, dtype=np.float64)
        gram = feats.T @ (feats * w[:, None])
        eigs = np.linalg.eigvalsh(gram)
        if eigs[0] <= 1e-12 * max(eigs[-1], 1.0):
            raise RankDeficientError(
                "weighted features do not span the parameter space")
        phi = np.linalg.solve(gram, feats.T @ (w * raw))
        return feats @ phi
    if structure.kind == DUELING:
        n = structure.n_items
        mat = raw.reshape(n, n)
        sym = 0.5 * (mat + 1.0 - mat.T)
        np.fill_diagonal(sym, 0.5)
        return sym.ravel()
    return raw.copy()


def is_unimodal(theta):
    """True when ``theta`` strictly increases to its peak then strictly
    decreases (either side possibly empty)."""
    theta = as_means(theta)
    peak = int(np.argmax(theta))
    left = np.all(np.diff(theta[:peak + 1]) > 0)
    right = np.all(np.diff(theta[peak:]) < 0)
    return bool(left and right)


def lipschitz_violation(theta, distances):
    """Largest amount by which ``|theta(x) - theta(y)|`` exceeds the
    pairwise distance; 0 means the vector is Lipschitz-compatible."""
    theta = as_means(theta)
    diff = np.abs(theta[:, None] - theta[None, :])
    return float(np.max(diff - distances))
