"""Hot orbit kernels.

The compiled ``_orbit_c`` extension is used when it was built; otherwise the
pure-Python ``_orbit_py`` module is selected. Set ``CROSSK_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the active implementation.
"""

import os

from . import _orbit_py as py_backend

c_backend = None
if not os.environ.get("CROSSK_PURE_PYTHON"):
    try:
        from . import _orbit_c as c_backend
    except ImportError:  # extension not built
        c_backend = None

active = c_backend if c_backend is not None else py_backend
BACKEND = "cython" if c_backend is not None else "python"

orbit = active.orbit
ergodic_sum = active.ergodic_sum
winding_sums = active.winding_sums
distality_min = active.distality_min

__all__ = ["BACKEND", "orbit", "ergodic_sum", "winding_sums", "distality_min",
           "py_backend", "c_backend"]
