"""Kernel backend selection.

The compiled ``_native`` extension is used when it imports; otherwise the
numpy implementations in ``_fallback`` are. Set ``BECQSL_PURE_PYTHON=1``
to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if not os.environ.get("BECQSL_PURE_PYTHON"):
    try:
        from . import _native as _impl  # noqa: F811

        BACKEND = "native"
    except ImportError:
        _impl = _fallback

j0 = _impl.j0
one_minus_j0 = _impl.one_minus_j0
one_minus_sinc = _impl.one_minus_sinc
angular_factor = _impl.angular_factor
gamma_integrands = _impl.gamma_integrands


def backend_module(name):
    """Return the kernel namespace for ``"native"`` or ``"python"``."""
    if name == "python":
        return _fallback
    if name == "native":
        from . import _native

        return _native
    raise ValueError(f"unknown backend {name!r}")
