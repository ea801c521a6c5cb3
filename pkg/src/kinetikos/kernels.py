"""Backend selection for the hot kernels.

The compiled ``_native`` extension is used when it imports; otherwise the
pure-Python ``_fallback`` takes over. Set ``KINETIKOS_BACKEND=python`` to
force the fallback (both produce identical results).
"""
import os

from . import _fallback

if os.environ.get("KINETIKOS_BACKEND", "").lower() == "python":
    _impl = _fallback
else:
    try:
        from . import _native as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = "native" if _impl is not _fallback else "python"

real_roots_batch = _impl.real_roots_batch
ball_depth = _impl.ball_depth
nearest_sites = _impl.nearest_sites


def backends():
    """Available kernel modules keyed by name (for benchmarks and tests)."""
    out = {"python": _fallback}
    try:
        from . import _native
    except ImportError:
        return out
    out["native"] = _native
    return out
