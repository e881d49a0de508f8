"""Kernel backend selection.

The compiled Cython core is used when available; otherwise the pure numpy
twin. `TASKREACH_BACKEND=pure|compiled` forces a choice (useful for the
parity tests and the benchmark; normal runs should leave it unset).
"""

import os

_requested = os.environ.get("TASKREACH_BACKEND", "").strip().lower()

if _requested == "pure":
    from . import _pure as impl
elif _requested == "compiled":
    from . import _core as impl  # ImportError here means the extension is absent
elif _requested:
    raise ValueError(f"TASKREACH_BACKEND must be 'pure' or 'compiled', not {_requested!r}")
else:
    try:
        from . import _core as impl
    except ImportError:
        from . import _pure as impl

BACKEND = impl.name


def load_backend(which: str):
    """Import a specific backend module ('pure' or 'compiled')."""
    if which == "pure":
        from . import _pure
        return _pure
    if which == "compiled":
        from . import _core
        return _core
    raise ValueError(which)
