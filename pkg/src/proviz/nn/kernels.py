"""Kernel backend selection.

Prefers the compiled extension when it was built, otherwise falls back to
the numpy implementation. ``PROVIZ_KERNELS=numpy`` (or ``cython``) forces a
backend, which the benchmark uses to time both on the same machine.
"""

from __future__ import annotations

import os

from proviz.nn import _kernels_np

_FORCED = os.environ.get("PROVIZ_KERNELS", "").strip().lower()

if _FORCED == "numpy":
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from proviz.nn import _fastkern as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _FORCED == "cython":
            raise ImportError(
                "PROVIZ_KERNELS=cython but the compiled extension is not built; "
                "run `pip install -e .` first"
            ) from None
        _impl = _kernels_np
        BACKEND = "numpy"

dense_forward = _impl.dense_forward
softmax = _impl.softmax
cross_entropy = _impl.cross_entropy
dense_backward = _impl.dense_backward
adam_step = _impl.adam_step


def available_backends() -> dict[str, object]:
    """Name -> module for every importable backend (used by tests/benchmark)."""
    backends: dict[str, object] = {"numpy": _kernels_np}
    try:
        from proviz.nn import _fastkern

        backends["cython"] = _fastkern
    except ImportError:
        pass
    return backends
