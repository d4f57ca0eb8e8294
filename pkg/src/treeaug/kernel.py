"""Pivot kernel selection.

The compiled extension is preferred when it was built; the pure-Python
fallback is always available.  Set TREEAUG_PURE_PYTHON=1 to force the
fallback (used by the kernel benchmark and the equivalence tests).
"""

import os

if os.environ.get("TREEAUG_PURE_PYTHON") == "1":
    from . import _simplex_py as _impl

    COMPILED = False
else:
    try:
        from . import _simplex as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _simplex_py as _impl

        COMPILED = False

pivot = _impl.pivot
KERNEL_NAME = "compiled" if COMPILED else "pure-python"
