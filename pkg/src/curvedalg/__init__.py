"""Exact-arithmetic engine for curved A-infinity deformation calculus.

Graded quivers over k[t]/t^(N+1), Hochschild braces, Maurer-Cartan checks,
twisted objects with allowability certificates, curvature removal, and the
chain-level linear algebra needed to verify the constructions -- all in
exact rational (or prime-field) arithmetic.
"""

from .scalars import (Field, QQ, TruncScalar, ScalarError, NotDivisible,
                      PrecisionExhausted, MixedCharacteristic, is_regular_on)
from .quiver import (GradedQuiver, TableQuiver, MonomialQuiver, BasisMor,
                     HomElement, FreeObject, MatrixHom, direct_sum,
                     QuiverError, WindowOverflow, DegreeMismatch)
from .hochschild import (EvalContext, Cochain, CurvedStructure, brace, dot,
                         bracket, verify_structure, curvature_of, assemble,
                         mc_check, mc_residual_half_bracket, gauge_transform,
                         extension_search, HochschildError, ArityBound,
                         Unverified, GaugeNotNilpotent, SearchUnbounded)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
