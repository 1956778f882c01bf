import numpy as np
import pytest

from structbandits import (
    NoCondorcetWinnerError,
    RankDeficientError,
    bernoulli_model,
)
from structbandits.structures import (
    classical_structure,
    condorcet_winner,
    dueling_structure,
    gap_vector,
    index_pair,
    is_unimodal,
    linear_structure,
    lipschitz_structure,
    lipschitz_violation,
    optimal_arm,
    pair_index,
    project_to_structure,
    reward,
    unimodal_structure,
    validate_dueling_means,
)

# beats-matrix with strict winner 0: theta(0,1)=0.7, theta(0,2)=0.6,
# theta(1,2)=0.55
DUEL3 = np.array([
    [0.5, 0.7, 0.6],
    [0.3, 0.5, 0.55],
    [0.4, 0.45, 0.5],
]).ravel()


def test_constructor_validation():
    with pytest.raises(ValueError):
        classical_structure(1)
    with pytest.raises(ValueError):
        unimodal_structure(1)
    with pytest.raises(ValueError):
        dueling_structure(1)
    with pytest.raises(ValueError):
        linear_structure(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        linear_structure([[np.inf, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        lipschitz_structure([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        lipschitz_structure([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        lipschitz_structure([[0.5, 1.0], [1.0, 0.5]])


def test_structure_shapes():
    lin = linear_structure(np.eye(3))
    assert lin.n_arms == 3 and lin.dim == 3
    duel = dueling_structure(3)
    assert duel.n_arms == 9 and duel.n_items == 3
    assert classical_structure(4).dim == 0


def test_pair_index_roundtrip():
    n = 5
    for arm in range(n * n):
        i, j = index_pair(arm, n)
        assert pair_index(i, j, n) == arm


def test_optimal_arm_and_gaps_value_based():
    theta = np.array([0.2, 0.8, 0.5])
    s = classical_structure(3)
    assert optimal_arm(s, theta) == 1
    assert np.allclose(gap_vector(s, theta), [0.6, 0.0, 0.3])
    assert reward(s, 2, theta) == 0.5
    # ties resolve to the lowest index
    assert optimal_arm(s, np.array([0.7, 0.7, 0.1])) == 0


def test_dueling_rewards_and_gaps():
    s = dueling_structure(3)
    w = pair_index(0, 0, 3)
    assert optimal_arm(s, DUEL3) == w
    assert reward(s, w, DUEL3) == 0.0
    # playing (1, 2) costs half the winner's margins over both items
    expected = -0.5 * ((0.7 - 0.5) + (0.6 - 0.5))
    assert reward(s, pair_index(1, 2, 3), DUEL3) == pytest.approx(expected)
    gaps = gap_vector(s, DUEL3)
    assert gaps[w] == 0.0
    assert np.all(gaps >= 0.0)
    assert gaps[pair_index(1, 2, 3)] == pytest.approx(-expected)


def test_condorcet_winner_strict_and_fallback():
    assert condorcet_winner(DUEL3, 3) == (0, True)
    # rock-paper-scissors cycle has no strict winner
    cycle = np.array([
        [0.5, 0.7, 0.3],
        [0.3, 0.5, 0.7],
        [0.7, 0.3, 0.5],
    ]).ravel()
    winner, strict = condorcet_winner(cycle, 3)
    assert not strict
    assert winner == 0
    with pytest.raises(NoCondorcetWinnerError):
        condorcet_winner(cycle, 3, require=True)


def test_validate_dueling_means():
    mat = validate_dueling_means(DUEL3, 3)
    assert mat.shape == (3, 3)
    bad = DUEL3.copy()
    bad[pair_index(0, 1, 3)] = 0.9
    with pytest.raises(ValueError):
        validate_dueling_means(bad, 3)
    with pytest.raises(ValueError):
        validate_dueling_means(np.full(9, 0.4), 3)


def test_linear_projection_identity_on_consistent_means():
    feats = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
    s = linear_structure(feats)
    phi = np.array([0.9, 0.4])
    theta = feats @ phi
    assert np.allclose(project_to_structure(s, theta), theta)


def test_linear_projection_weighted_least_squares():
    feats = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    s = linear_structure(feats)
    raw = np.array([1.0, 2.0, 0.0])
    w = np.array([1.0, 1.0, 4.0])
    gram = feats.T @ (feats * w[:, None])
    phi = np.linalg.solve(gram, feats.T @ (w * raw))
    assert np.allclose(project_to_structure(s, raw, weights=w), feats @ phi)


def test_linear_projection_rank_deficient():
    s = linear_structure(np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]))
    with pytest.raises(RankDeficientError):
        project_to_structure(s, np.array([1.0, 2.0, 3.0]))
    # zero weights on all arms spanning the second coordinate
    s2 = linear_structure(np.eye(2))
    with pytest.raises(RankDeficientError):
        project_to_structure(s2, np.array([1.0, 1.0]),
                             weights=np.array([1.0, 0.0]))


def test_dueling_projection_symmetrizes():
    s = dueling_structure(2)
    raw = np.array([0.44, 0.8, 0.3, 0.55])
    proj = project_to_structure(s, raw).reshape(2, 2)
    assert proj[0, 0] == 0.5 and proj[1, 1] == 0.5
    assert proj[0, 1] == pytest.approx(0.5 * (0.8 + 1.0 - 0.3))
    assert proj[0, 1] + proj[1, 0] == pytest.approx(1.0)


def test_projection_identity_for_unconstrained_kinds():
    raw = np.array([0.3, 0.1, 0.2])
    for s in (classical_structure(3), unimodal_structure(3),
              lipschitz_structure(1.0 - np.eye(3))):
        out = project_to_structure(s, raw)
        assert np.array_equal(out, raw)
        assert out is not raw


def test_projection_length_mismatch():
    with pytest.raises(ValueError):
        project_to_structure(classical_structure(3), np.array([0.1, 0.2]))


def test_is_unimodal():
    assert is_unimodal([0.1, 0.5, 0.3])
    assert is_unimodal([0.5, 0.3, 0.1])
    assert is_unimodal([0.1, 0.3, 0.5])
    assert not is_unimodal([0.5, 0.1, 0.5])
    assert not is_unimodal([0.1, 0.1, 0.5])


def test_lipschitz_violation():
    dist = np.array([[0.0, 0.1], [0.1, 0.0]])
    # the zero diagonal keeps compatible vectors at exactly 0
    assert lipschitz_violation([0.5, 0.55], dist) == 0.0
    assert lipschitz_violation([0.5, 0.8], dist) == pytest.approx(0.2)


def test_reward_model_independence(bernoulli):
    # reward extraction never consults the observation model
    theta = np.array([0.2, 0.9])
    assert reward(classical_structure(2), 1, theta) == 0.9
    bernoulli.validate_means(theta)
