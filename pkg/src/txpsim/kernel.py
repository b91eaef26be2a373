"""Kernel selection.

The compiled extension is preferred when it imported cleanly; the pure-Python
reference kernel is the fallback and the behavioral contract. Setting
TXPSIM_PURE=1 in the environment forces the pure kernel, which is how the
equivalence tests pin both sides down.
"""

import os

from . import _fallback

BACKEND = "pure"
_impl = _fallback

if not os.environ.get("TXPSIM_PURE"):
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        pass


def run(cfg, blocks) -> dict:
    """Run one configured scenario on the selected kernel."""
    return _impl.run_kernel(cfg, blocks)


def backend() -> str:
    return BACKEND
