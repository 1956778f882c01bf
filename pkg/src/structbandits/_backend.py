"""Backend selection: compiled kernels when available, pure Python otherwise.

The environment variable ``STRUCTBANDITS_FORCE_PURE=1`` forces the pure
backend even when the compiled extension is importable (used by the
parity tests and the benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("STRUCTBANDITS_FORCE_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME = _impl.BACKEND_NAME

kl_bernoulli = _impl.kl_bernoulli
kl_gaussian = _impl.kl_gaussian
simplex_min = _impl.simplex_min
run_rate_matching_episode = _impl.run_rate_matching_episode


def get_backend(name=None):
    """Return the kernel module for ``name``: ``None`` or ``"active"`` for
    the selected backend, ``"pure"`` or ``"compiled"`` explicitly.

    Raises ``ValueError`` for unknown names and ``RuntimeError`` when the
    compiled backend is requested but was not built.
    """
    if name is None or name == "active":
        return _impl
    if name == "pure":
        return _kernels_py
    if name == "compiled":
        try:
            from . import _kernels
        except ImportError as exc:
            raise RuntimeError("compiled kernels are not available") from exc
        return _kernels
    raise ValueError("unknown backend %r" % (name,))
