"""Computational companion for crossed products of tori by diffeomorphisms.

Modules: exact abelian-group algebra (``fgab``), torus maps (``torus``),
K-theory via the Pimsner-Voiculescu sequence (``ktheory``), Elliott
invariants (``elliott``), derivative growth (``tempered``), smooth crossed
products (``smooth_cp``), a sequence Banach algebra (``schweitzer``) and
integer-matrix similarity (``conjugacy``).
"""

__version__ = "0.1.0"

from .errors import CrossKError, InvalidArgument, ResourceLimit, UnsupportedOperation  # noqa: E402
from .fgab import FgAbGroup, IntMatrix, cokernel, exterior_power, smith_normal_form  # noqa: E402
from .torus import TorusMap  # noqa: E402

__all__ = ["__version__", "CrossKError", "InvalidArgument", "ResourceLimit",
           "UnsupportedOperation", "FgAbGroup", "IntMatrix", "cokernel", "exterior_power",
           "smith_normal_form", "TorusMap"]
