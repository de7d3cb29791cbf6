"""Singular Hessians, and certificates for dimension-5 geometry.

The pipeline turns a polynomial ``h`` with ``det Hess(h) = 0`` into a
quasi-translation ``x + H`` with ``H = (grad R)(grad h)``, where ``R`` is a
minimal-degree relation among the partials of ``h``.  The remaining
functions check GN-planes, projective image apexes and normal forms against
explicit witnesses.  Apex and linear-closure answers are relative to the
relation-degree bound they were computed with.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BoundExhausted, PreconditionError, TheoremViolation, WitnessError
from .gcd import gcd_many
from .linalg import det, hessian, jacobian, rank_ff, scalar_inverse
from .poly import NEG_INF, Poly, PolyMap, VarContext
from .qt import (
    _fresh,
    _shift_images,
    _xvars,
    apply_linear,
    as_map,
    is_invariant,
    is_quasi_translation,
)
from .relations import (
    DEFAULT_ENTRY_CAP,
    Relation,
    RelationBasis,
    find_relations,
    linear_relations,
    reduce_mod_linear,
)
from .scalar import Scalar


@dataclass
class HessianPipelineResult:
    h: Poly
    R: Relation
    H: PolyMap
    checks: dict
    basis: RelationBasis = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(v is not False for v in self.checks.values())


def hessian_to_qt(h: Poly, dmax: int | None = None, cap: int = DEFAULT_ENTRY_CAP) -> HessianPipelineResult:
    """Quasi-translation attached to ``h`` through a minimal relation of grad h."""
    if det(hessian(h)):
        raise PreconditionError("det Hess(h) is not zero")
    grad = h.gradient()
    basis = find_relations(grad, dmax, cap)
    if basis.minimal_degree is None:
        raise BoundExhausted(f"no relation of grad h up to degree {basis.degree_bound}", basis.degree_bound)
    rel = basis.minimal()[0]
    R = rel.R
    H = R.gradient().compose(list(grad))
    H = PolyMap(list(H), ctx=h.ctx)

    t = _fresh(h.ctx, "t")
    T = h.ctx.adjoin(t)
    shift = _shift_images(H, Poly.var(T, t))
    checks = {
        "det_hessian_zero": True,
        "relation_certified": rel.certified,
        "JH_H_zero": is_quasi_translation(H),
        "grad_h_invariant": all(g.substitute(shift) == g.embed(T) for g in grad),
        "H_nonzero": not H.is_zero(),
        "h_invariant": None,
    }
    if all(part.compose(list(grad)).is_zero() for _, part in R.homogeneous_components()):
        checks["h_invariant"] = h.substitute(shift) == h.embed(T)
    failed = [k for k, v in checks.items() if v is False]
    if failed:
        raise TheoremViolation(f"Hessian pipeline check(s) failed: {', '.join(failed)}")
    return HessianPipelineResult(h, rel, H, checks, basis)


def gradient_linear_dependence(h: Poly) -> list[Relation]:
    """Linear relations among the partials of a homogeneous h in at most 4 variables
    with vanishing Hessian determinant; these always exist."""
    n = len(h.ctx)
    if n > 4:
        raise PreconditionError(f"dimension {n} > 4")
    if not h.is_homogeneous():
        raise PreconditionError("h is not homogeneous")
    if det(hessian(h)):
        raise PreconditionError("det Hess(h) is not zero")
    rels = linear_relations(h.gradient())
    if not rels:
        raise TheoremViolation(f"partials of {h} are linearly independent despite det Hess(h) = 0")
    return rels


def _vector(v, n=None) -> list[Scalar]:
    out = [Scalar.coerce(c.constant_value() if isinstance(c, Poly) else c) for c in v]
    if n is not None and len(out) != n:
        raise PreconditionError(f"expected a vector of length {n}, got {len(out)}")
    return out


def _independent(u, v) -> bool:
    n = len(u)
    return any(u[i] * v[j] - u[j] * v[i] for i in range(n) for j in range(i + 1, n))


def is_gn_plane(H, u, v) -> bool:
    """Whether span(u, v) lies in V(H), i.e. ``H(s u + t v) = 0`` identically."""
    H = as_map(H)
    xs = _xvars(H)
    u, v = _vector(u, len(xs)), _vector(v, len(xs))
    if not _independent(u, v):
        raise PreconditionError("u and v are linearly dependent")
    s_name = _fresh(H.ctx, "s")
    t_name = _fresh(H.ctx.adjoin(s_name), "t")
    ST = VarContext((s_name, t_name))
    s, t = Poly.var(ST, s_name), Poly.var(ST, t_name)
    images = {x: s * a + t * b for x, a, b in zip(xs, u, v)}
    return all(c.substitute(images, ST).is_zero() for c in H)


@dataclass
class ApexCertificate:
    p: list
    degree_bound: int
    holds: bool
    breaking_relation: Relation | None = None
    relations_checked: int = 0


def apex_certificate(H, p, dmax: int | None = None, cap: int = DEFAULT_ENTRY_CAP) -> ApexCertificate:
    """Bound-relative projective image apex test.

    ``holds`` means every relation of H up to the degree bound still
    vanishes on ``H + t p``.
    """
    H = as_map(H)
    p = _vector(p, len(H))
    if not any(p):
        raise PreconditionError("an apex direction must be nonzero")
    basis = find_relations(H, dmax, cap)
    t = _fresh(H.ctx, "t")
    T = H.ctx.adjoin(t)
    tv = Poly.var(T, t)
    shifted = [c.embed(T) + tv * a for c, a in zip(H, p)]
    for rel in basis.generators:
        if not rel.R.compose(shifted).is_zero():
            return ApexCertificate(p, basis.degree_bound, False, rel, len(basis.generators))
    return ApexCertificate(p, basis.degree_bound, True, None, len(basis.generators))


@dataclass
class LinearClosureCertificate:
    linear: list[Relation]
    degree_bound: int
    holds: bool
    breaking_relation: Relation | None = None


def linear_closure_certificate(H, dmax: int | None = None, linear_count: int | None = 2,
                               cap: int = DEFAULT_ENTRY_CAP) -> LinearClosureCertificate:
    """Bound-relative test that the image closure of H is cut out by linear forms.

    With the default ``linear_count=2`` (n = 5, rank 3) the closure must be a
    3-space: exactly two independent linear relations, and every relation up
    to ``dmax`` reduces to zero modulo them.
    """
    H = as_map(H)
    lin = linear_relations(H)
    basis = find_relations(H, dmax, cap)
    if linear_count is not None and len(lin) != linear_count:
        return LinearClosureCertificate(lin, basis.degree_bound, False)
    for rel in basis.generators:
        if reduce_mod_linear(rel, lin):
            return LinearClosureCertificate(lin, basis.degree_bound, False, rel)
    return LinearClosureCertificate(lin, basis.degree_bound, True)


def _only_uses(p: Poly, names) -> bool:
    return set(p.variables()) <= set(names)


def gn_form_verify(h: Poly, T, f: Poly, a1: Poly, a2: Poly, a3: Poly) -> bool:
    """Check ``h(Tx) = f(x1, x2, a1 x3 + a2 x4 + a3 x5)`` exactly.

    ``f`` is read as a polynomial in the first three variables of its own
    context; ``a1, a2, a3`` may only involve x1 and x2.
    """
    X = h.ctx
    if len(X) != 5:
        raise PreconditionError("normal form verification is for n = 5")
    rows = [_vector(r, 5) for r in T]
    if len(rows) != 5:
        raise WitnessError("T must be 5x5")
    try:
        scalar_inverse(rows)
    except PreconditionError:
        raise WitnessError("T is singular") from None
    fvars = f.ctx.names[:3]
    if not _only_uses(f, fvars):
        raise WitnessError("f may only involve its first three variables")
    x1, x2, x3, x4, x5 = (Poly.var(X, v) for v in X.names)
    coeffs = []
    for a in (a1, a2, a3):
        a = a.embed(X) if a.ctx != X else a
        if not _only_uses(a, X.names[:2]):
            raise WitnessError(f"{a} is not a polynomial in x1, x2")
        coeffs.append(a)
    inner = coeffs[0] * x3 + coeffs[1] * x4 + coeffs[2] * x5
    rhs = f.substitute(dict(zip(fvars, (x1, x2, inner))), X)
    lhs = apply_linear(PolyMap([h], ctx=X), rows)[0]
    return lhs == rhs


def fall_b_form_verify(H, dist: int, g: Poly, hvec, p: Poly, q: Poly) -> bool:
    """Check ``H = (g h_1(p,q), ..., g h_4(p,q))`` off the distinguished
    component, and that g, p, q are invariants of x + H.

    ``dist`` is 1-based, matching the variable names x1..x5.
    """
    H = as_map(H)
    if len(H) != 5:
        raise PreconditionError("this form is stated for n = 5")
    if not 1 <= dist <= 5:
        raise WitnessError("dist must be in 1..5")
    hvec = list(hvec)
    if len(hvec) != 4:
        raise WitnessError("hvec needs four polynomials")
    if not g:
        raise WitnessError("g = 0 is a degenerate witness")
    for name, w in (("g", g), ("p", p), ("q", q)):
        if not w.is_homogeneous():
            raise WitnessError(f"{name} is not homogeneous")
    if gcd_many([p, q]) != 1:
        raise WitnessError("gcd(p, q) != 1")
    g, p, q = (w.embed(H.ctx) if w.ctx != H.ctx else w for w in (g, p, q))
    others = [c for k, c in enumerate(H, start=1) if k != dist]
    for hi, Hi in zip(hvec, others):
        yv = hi.ctx.names[:2]
        if not _only_uses(hi, yv):
            raise WitnessError(f"{hi} is not a polynomial in two variables")
        if g * hi.substitute(dict(zip(yv, (p, q))), H.ctx) != Hi:
            return False
    if not is_quasi_translation(H):
        raise PreconditionError("x + H is not a quasi-translation")
    return all(is_invariant(w, H) for w in (g, p, q))


@dataclass
class DegreeReport:
    degree: object
    component_degrees: list
    variable_degrees: list  # [component][variable]
    variables: tuple
    rank: int
    linear_invariant_count: int

    def as_dict(self):
        def enc(d):
            return "-inf" if d is NEG_INF else d

        return {
            "degree": enc(self.degree),
            "component_degrees": [enc(d) for d in self.component_degrees],
            "variable_degrees": {
                v: [enc(row[j]) for row in self.variable_degrees] for j, v in enumerate(self.variables)
            },
            "rank": self.rank,
            "linear_invariants": self.linear_invariant_count,
        }


def degree_report(H) -> DegreeReport:
    """Observable degree data of H: total and per-variable degrees, rank of JH,
    number of independent linear invariants."""
    H = as_map(H)
    xs = _xvars(H)
    table = [[c.degree_in(v) for v in xs] for c in H]
    return DegreeReport(
        degree=H.degree(),
        component_degrees=[c.degree() for c in H],
        variable_degrees=table,
        variables=xs,
        rank=rank_ff(jacobian(H, xs)),
        linear_invariant_count=len(linear_relations(H)),
    )
