"""Observation models, KL divergences, seeded random streams, and the
running-mean statistic shared by every sampling rule.
"""

import dataclasses

import numpy as np

from . import _backend

__all__ = [
    "BERNOULLI",
    "GAUSSIAN",
    "InvalidMeanError",
    "ObservationModel",
    "ParameterVector",
    "RngStream",
    "RunningMean",
    "bernoulli_model",
    "gaussian_model",
    "kl_div",
    "sample_observation",
    "update_running_mean",
    "as_means",
]

BERNOULLI = "bernoulli"
GAUSSIAN = "gaussian"

_UINT64_MASK = (1 << 64) - 1


class InvalidMeanError(ValueError):
    """A mean lies outside the observation model's domain."""


@dataclasses.dataclass(frozen=True)
class ObservationModel:
    """Per-arm observation model.

    Parameters
    ----------
    kind : str
        ``"bernoulli"`` (means in [0, 1], rewards in {0, 1}) or
        ``"gaussian"`` (unit variance, means anywhere on the real line).
    """

    kind: str

    def __post_init__(self):
        if self.kind not in (BERNOULLI, GAUSSIAN):
            raise ValueError("unknown observation model %r" % (self.kind,))

    def mean_bounds(self):
        """Closed domain of valid means as ``(low, high)``."""
        if self.kind == BERNOULLI:
            return 0.0, 1.0
        return -np.inf, np.inf

    def validate_mean(self, mean):
        """Raise :class:`InvalidMeanError` if ``mean`` is outside the domain."""
        if not np.isfinite(mean):
            raise InvalidMeanError("mean must be finite, got %r" % (mean,))
        low, high = self.mean_bounds()
        if mean < low or mean > high:
            raise InvalidMeanError(
                "mean %r outside [%s, %s] for %s model"
                % (mean, low, high, self.kind))

    def validate_means(self, means):
        for v in np.asarray(means, dtype=np.float64).ravel():
            self.validate_mean(float(v))


def bernoulli_model():
    return ObservationModel(BERNOULLI)


def gaussian_model():
    return ObservationModel(GAUSSIAN)


def as_means(theta):
    """Coerce ``theta`` (ParameterVector, array, or sequence) to a 1-D
    contiguous float64 array without copying when already in that form."""
    if isinstance(theta, ParameterVector):
        return theta.means
    arr = np.ascontiguousarray(theta, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("means must be one-dimensional")
    return arr


@dataclasses.dataclass(frozen=True)
class ParameterVector:
    """Vector of arm means, validated against an observation model."""

    means: np.ndarray
    model: ObservationModel

    def __post_init__(self):
        arr = np.ascontiguousarray(self.means, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("means must be a nonempty 1-D vector")
        self.model.validate_means(arr)
        object.__setattr__(self, "means", arr)

    def __len__(self):
        return self.means.shape[0]


def kl_div(model, p, q):
    """KL divergence (nats) between the observation distributions with
    means ``p`` and ``q`` under ``model``.

    Bernoulli: ``p*ln(p/q) + (1-p)*ln((1-p)/(1-q))`` with the 0*ln(0) = 0
    convention; returns ``+inf`` when absolute continuity fails (``q`` at
    a boundary with ``p`` elsewhere).  Gaussian unit variance:
    ``(p - q)**2 / 2``.

    Raises
    ------
    InvalidMeanError
        If ``p`` or ``q`` is outside the model's domain.
    """
    model.validate_mean(p)
    model.validate_mean(q)
    if model.kind == BERNOULLI:
        return _backend.kl_bernoulli(float(p), float(q))
    return _backend.kl_gaussian(float(p), float(q))


@dataclasses.dataclass(frozen=True)
class RngStream:
    """Counter-based random stream.

    ``(seed, stream_id)`` fully determines the draw sequence, so any
    number of streams can be consumed concurrently, in any order and on
    any worker, without affecting each other.
    """

    seed: int
    stream_id: int = 0

    def generator(self):
        """Fresh generator positioned at the start of the stream."""
        key = np.array(
            [self.seed & _UINT64_MASK, self.stream_id & _UINT64_MASK],
            dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, offset):
        """Derived stream with ``stream_id`` shifted by ``offset``."""
        return RngStream(self.seed, self.stream_id + offset)


def sample_observation(model, mean, rng):
    """Draw one observation with the given ``mean``.

    ``rng`` is a :class:`numpy.random.Generator` or :class:`RngStream`.
    Bernoulli draws consume one uniform (reward 1 iff ``u < mean``);
    Gaussian draws consume one standard normal.
    """
    model.validate_mean(mean)
    if isinstance(rng, RngStream):
        rng = rng.generator()
    if model.kind == BERNOULLI:
        return 1.0 if rng.random() < mean else 0.0
    return float(mean) + float(rng.standard_normal())


@dataclasses.dataclass(frozen=True)
class RunningMean:
    """Incrementally updated sample mean; ``count == 0`` implies ``mean == 0``."""

    count: int = 0
    mean: float = 0.0


def update_running_mean(stat, value):
    """Fold one observation into ``stat`` and return the new statistic.

    Uses the same update the episode kernels use,
    ``(mean*count + value) / (count + 1)``, so both stay bit-identical.
    """
    new_mean = (stat.mean * stat.count + value) / (stat.count + 1)
    return RunningMean(stat.count + 1, new_mean)
