"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
fallback is bit-identical and always available. Set ``PROCURE_BACKEND=python``
to force the fallback (e.g. for the backend benchmark) or ``PROCURE_BACKEND=c``
to fail loudly if the extension is missing.
"""

import os

from . import pykernels
from .pykernels import SplitMix64, derive_seed

_requested = os.environ.get("PROCURE_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _ckernels as _impl
        BACKEND = "c"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"
elif _requested == "c":
    from . import _ckernels as _impl
    BACKEND = "c"
elif _requested in ("python", "py"):
    _impl = pykernels
    BACKEND = "python"
else:
    raise ImportError(f"PROCURE_BACKEND={_requested!r}: expected 'auto', 'c', or 'python'")

simulate = _impl.simulate
subproblem_effect = _impl.subproblem_effect
subproblem_greedy = _impl.subproblem_greedy
subproblem_tabu = _impl.subproblem_tabu


def get_backend(name: str = "auto"):
    """Return the kernel module for an explicit backend name."""
    if name in ("auto", ""):
        return _impl
    if name == "c":
        from . import _ckernels
        return _ckernels
    if name in ("python", "py"):
        return pykernels
    raise ValueError(f"unknown backend {name!r}")
