"""Kernel backend selection: compiled extension when available, pure Python otherwise.

Set POLYSEMIGROUP_PURE_PY=1 to force the pure-Python backend (used by the
benchmark and the backend-parity tests).
"""

import os

if os.environ.get("POLYSEMIGROUP_PURE_PY"):
    from . import _series_kernel_py as _impl
else:
    try:
        from . import _series_kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _series_kernel_py as _impl

BACKEND = _impl.BACKEND

first_nonzero = _impl.first_nonzero
last_nonzero = _impl.last_nonzero
add_trunc = _impl.add_trunc
sub_trunc = _impl.sub_trunc
scale_trunc = _impl.scale_trunc
mul_trunc = _impl.mul_trunc
compose_trunc = _impl.compose_trunc
pow_trunc = _impl.pow_trunc


def backends():
    """All importable backends, for parity tests and benchmarks."""
    from . import _series_kernel_py

    found = {"python": _series_kernel_py}
    try:
        from . import _series_kernel  # type: ignore[attr-defined]

        found["cython"] = _series_kernel
    except ImportError:
        pass
    return found
