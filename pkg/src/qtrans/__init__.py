"""Exact computations with quasi-translations ``x + H`` over the Gaussian rationals."""

from __future__ import annotations

from .errors import (
    BoundExhausted,
    ContextError,
    ParseError,
    PreconditionError,
    QtError,
    ResourceCapExceeded,
    TheoremViolation,
    WitnessError,
)
from .gcd import gcd, gcd_many
from .gn5 import (
    apex_certificate,
    degree_report,
    fall_b_form_verify,
    gn_form_verify,
    gradient_linear_dependence,
    hessian_to_qt,
    is_gn_plane,
    linear_closure_certificate,
)
from .linalg import PolyMatrix, det, hessian, is_nilpotent, jacobian, rank_ff
from .parse import parse_poly
from .poly import NEG_INF, Poly, PolyMap, VarContext
from .qt import (
    check_qt_equivalences,
    homogeneous_qt_checks,
    is_invariant,
    is_quasi_translation,
    linear_invariants,
    qt_conjugate_linear,
    qt_conjugation_criterion,
    qt_dehomogenize,
    qt_gcd_split,
    qt_homogenize,
)
from .relations import Relation, RelationBasis, find_relations, linear_relations
from .scalar import I, ONE, ZERO, Scalar

__version__ = "0.1.0"
