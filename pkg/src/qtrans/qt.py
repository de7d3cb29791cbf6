"""Quasi-translations x + H and their invariants.

``x + H`` is a quasi-translation when ``x - H`` is its inverse.  Three
equivalent tests are provided; ``JH * H == 0`` is the cheap one and the other
two are used for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, TheoremViolation
from .gcd import gcd_many
from .linalg import PolyMatrix, is_nilpotent, jacobian, rank_ff, scalar_inverse
from .poly import NEG_INF, Poly, PolyMap, VarContext
from .relations import linear_relations

__all__ = [
    "PolyMap",
    "QtReport",
    "is_quasi_translation",
    "check_qt_equivalences",
    "is_invariant",
    "qt_gcd_split",
    "qt_conjugate_linear",
    "qt_conjugation_criterion",
    "qt_homogenize",
    "qt_dehomogenize",
    "homogeneous_qt_checks",
    "linear_invariants",
]


def as_map(H) -> PolyMap:
    return H if isinstance(H, PolyMap) else PolyMap(H)


def _xvars(H: PolyMap) -> tuple[str, ...]:
    if len(H.ctx) < len(H):
        raise PreconditionError(f"map of length {len(H)} lives in a context of size {len(H.ctx)}")
    return H.ctx.names[: len(H)]


def _fresh(ctx: VarContext, stem: str) -> str:
    name, k = stem, 0
    while name in ctx:
        k += 1
        name = f"{stem}{k}"
    return name


def _shift_images(H: PolyMap, scale=None):
    """Images of x under ``x + scale*H`` (scale a Poly in a possibly larger context)."""
    xs = _xvars(H)
    ctx = H.ctx if scale is None else scale.ctx
    return {
        v: Poly.var(ctx, v) + (h.embed(ctx) if scale is None else h.embed(ctx) * scale)
        for v, h in zip(xs, H)
    }


def jh_times_h(H: PolyMap) -> PolyMap:
    return jacobian(H, _xvars(H)) @ list(H)


def is_quasi_translation(H) -> bool:
    """``JH * H == 0``."""
    H = as_map(H)
    return jh_times_h(H).is_zero()


@dataclass(frozen=True)
class QtReport:
    cond_inverse: bool
    cond_Ht: bool
    cond_JHH: bool

    @property
    def agree(self) -> bool:
        return self.cond_inverse == self.cond_Ht == self.cond_JHH

    @property
    def all_true(self) -> bool:
        return self.cond_inverse and self.cond_Ht and self.cond_JHH

    def as_dict(self):
        return {
            "cond_inverse": self.cond_inverse,
            "cond_Ht": self.cond_Ht,
            "cond_JHH": self.cond_JHH,
            "agree": self.agree,
        }


def _inverse_condition(H: PolyMap) -> bool:
    xs = _xvars(H)
    X = [Poly.var(H.ctx, v) for v in xs]
    F = {v: x + h for v, x, h in zip(xs, X, H)}
    # (x - H) o (x + H) == x, composed literally
    return all((x - h).substitute(F) == x for x, h in zip(X, H))


def _t_condition(H: PolyMap) -> bool:
    t = _fresh(H.ctx, "t")
    T = H.ctx.adjoin(t)
    images = _shift_images(H, Poly.var(T, t))
    return all(h.substitute(images) == h.embed(T) for h in H)


def check_qt_equivalences(H) -> QtReport:
    """Evaluate the three equivalent quasi-translation conditions independently."""
    H = as_map(H)
    return QtReport(
        cond_inverse=_inverse_condition(H),
        cond_Ht=_t_condition(H),
        cond_JHH=is_quasi_translation(H),
    )


def _require_qt(H: PolyMap):
    if not is_quasi_translation(H):
        raise PreconditionError("x + H is not a quasi-translation")


def invariant_defect(f: Poly, H: PolyMap) -> Poly:
    """``Jf * H``; zero exactly when f is an invariant of x + H."""
    xs = _xvars(H)
    total = Poly.zero(H.ctx)
    for v, h in zip(xs, H):
        d = f.partial(v) if v in f.ctx else None
        if d:
            total = total + d * h
    return total


def is_invariant(f: Poly, H, verify: bool = False) -> bool:
    """Whether ``f(x + H) = f``, decided through ``Jf * H = 0``.

    With ``verify=True`` the forms ``f(x + H) = f`` and ``f(x + tH) = f`` are
    evaluated too, and a disagreement raises :class:`TheoremViolation`.
    """
    H = as_map(H)
    _require_qt(H)
    f = f.embed(H.ctx) if f.ctx != H.ctx else f
    fast = invariant_defect(f, H).is_zero()
    if verify:
        at_one = f.substitute(_shift_images(H)) == f
        t = _fresh(H.ctx, "t")
        T = H.ctx.adjoin(t)
        at_t = f.substitute(_shift_images(H, Poly.var(T, t))) == f.embed(T)
        if not (fast == at_one == at_t):
            raise TheoremViolation(
                f"invariant criteria disagree for f = {f}: Jf.H={fast}, f(x+H)={at_one}, f(x+tH)={at_t}"
            )
    return fast


def qt_gcd_split(H):
    """Write ``H = g * Ht`` with the components of Ht coprime; g is monic."""
    H = as_map(H)
    if H.is_zero():
        raise PreconditionError("gcd split of the zero map")
    _require_qt(H)
    g = gcd_many(list(H))
    Ht = PolyMap([h.div_exact(g) for h in H], ctx=H.ctx)
    if not is_quasi_translation(Ht):
        raise TheoremViolation("dividing a quasi-translation by its gcd broke the property")
    hd = Ht.homogeneous_degree()
    if hd is not None and hd is not NEG_INF and hd > 0:
        xs = _xvars(H)
        if rank_ff(jacobian(H, xs)) != rank_ff(jacobian(Ht, xs)):
            raise TheoremViolation("Jacobian rank changed under gcd split")
    return g, Ht


def _scalar_rows(T):
    if isinstance(T, PolyMatrix):
        return T.scalars()
    return [[v.constant_value() if isinstance(v, Poly) else v for v in r] for r in T]


def apply_linear(H: PolyMap, T) -> PolyMap:
    """``H(Tx)``; T acts on the first ``len(T)`` context variables."""
    rows = _scalar_rows(T)
    if len(H.ctx) < len(rows):
        raise PreconditionError("T is larger than the variable context")
    xs = H.ctx.names[: len(rows)]
    X = [Poly.var(H.ctx, v) for v in xs]
    images = {}
    for v, row in zip(xs, rows):
        img = Poly.zero(H.ctx)
        for c, x in zip(row, X):
            img = img + x * c
        images[v] = img
    return H.substitute(images)


def matvec_scalar(rows, H: PolyMap) -> PolyMap:
    out = []
    for row in rows:
        acc = Poly.zero(H.ctx)
        for c, h in zip(row, H):
            acc = acc + h * c
        out.append(acc)
    return PolyMap(out, ctx=H.ctx)


def qt_conjugate_linear(H, T) -> PolyMap:
    """``T^-1 H(Tx)`` for an invertible constant matrix T."""
    H = as_map(H)
    rows = _scalar_rows(T)
    if len(rows) != len(H) or any(len(r) != len(H) for r in rows):
        raise PreconditionError("T must be square of the map's size")
    Tinv = scalar_inverse(rows)
    _require_qt(H)
    out = matvec_scalar(Tinv, apply_linear(H, rows))
    if not is_quasi_translation(out):
        raise TheoremViolation("linear conjugate of a quasi-translation is not one")
    return out


@dataclass(frozen=True)
class ConjugationResult:
    holds: bool
    t_degrees: tuple
    conjugate: PolyMap | None = None

    def __bool__(self):
        return self.holds


def qt_conjugation_criterion(H, F, G) -> ConjugationResult:
    """Whether ``G o (x + H) o F`` is again a quasi-translation.

    F and G are full maps (not displacements) with ``G o F = x``.  The test
    is ``deg_t G_i(x + tH) <= 1`` for all i; when it holds the conjugate is
    built and re-checked.
    """
    H, F, G = as_map(H), as_map(F), as_map(G)
    if not (len(H) == len(F) == len(G)):
        raise PreconditionError("H, F and G must have the same length")
    xs = _xvars(H)
    F = F.embed(H.ctx) if F.ctx != H.ctx else F
    G = G.embed(H.ctx) if G.ctx != H.ctx else G
    X = [Poly.var(H.ctx, v) for v in xs]
    GF = G.substitute(dict(zip(xs, F)))
    if list(GF) != X:
        raise PreconditionError("G is not the inverse of F")
    _require_qt(H)
    t = _fresh(H.ctx, "t")
    T = H.ctx.adjoin(t)
    shifted = G.substitute(_shift_images(H, Poly.var(T, t)))
    degs = tuple(g.degree_in(t) for g in shifted)
    holds = all(d <= 1 for d in degs)
    conj = None
    if holds:
        # G o (x + H) o F - x
        xH = {v: x + h for v, x, h in zip(xs, X, H)}
        full = G.substitute(xH).substitute(dict(zip(xs, F)))
        conj = PolyMap([c - x for c, x in zip(full, X)], ctx=H.ctx)
        if not is_quasi_translation(conj):
            raise TheoremViolation("conjugation criterion held but the conjugate is not a quasi-translation")
    return ConjugationResult(holds, degs, conj)


def qt_homogenize(H, d: int) -> PolyMap:
    """The (n+1)-dimensional homogeneous map ``x_{n+1}^d (H(x / x_{n+1}), 0)``."""
    H = as_map(H)
    if H.degree() is not NEG_INF and d < H.degree():
        raise PreconditionError(f"d = {d} is below deg H = {H.degree()}")
    if d < 0:
        raise PreconditionError("d must be non-negative")
    _require_qt(H)
    xs = _xvars(H)
    if len(H.ctx) > len(xs) and any(any(e[len(xs):]) for h in H for e, _ in h.items()):
        raise PreconditionError("map involves variables beyond x1..xn")
    new = _fresh(VarContext(xs), f"x{len(xs) + 1}")
    ctx = VarContext(xs + (new,))
    comps = []
    for h in H:
        terms = {}
        for e, c in h.items():
            e = e[: len(xs)]
            terms[e + (d - sum(e),)] = c
        comps.append(Poly(ctx, terms))
    comps.append(Poly.zero(ctx))
    out = PolyMap(comps, ctx=ctx)
    hd = out.homogeneous_degree()
    if not (hd is NEG_INF or hd == d):
        raise TheoremViolation("homogenization is not homogeneous of degree d")
    if not is_quasi_translation(out):
        raise TheoremViolation("homogenization is not a quasi-translation")
    return out


def qt_dehomogenize(H) -> PolyMap:
    """Set the last variable to 1 and drop the last component."""
    H = as_map(H)
    xs = _xvars(H)
    if len(xs) < 2:
        raise PreconditionError("cannot dehomogenize a map of dimension < 2")
    ctx = VarContext(xs[:-1])
    comps = []
    for h in list(H)[:-1]:
        terms = {}
        for e, c in h.items():
            k = e[: len(xs) - 1]
            terms[k] = terms[k] + c if k in terms else c
        comps.append(Poly(ctx, terms))
    return PolyMap(comps, ctx=ctx)


@dataclass(frozen=True)
class HomogeneousChecks:
    H_of_H_zero: bool
    rank: int
    rank_bound: int
    nilpotent: bool

    @property
    def rank_ok(self) -> bool:
        return self.rank <= self.rank_bound

    @property
    def passed(self) -> bool:
        return self.H_of_H_zero and self.rank_ok and self.nilpotent

    def as_dict(self):
        return {
            "H_of_H_zero": self.H_of_H_zero,
            "rank": self.rank,
            "rank_bound": self.rank_bound,
            "rank_ok": self.rank_ok,
            "nilpotent": self.nilpotent,
            "passed": self.passed,
        }


def homogeneous_qt_checks(H) -> HomogeneousChecks:
    """Consequences for homogeneous quasi-translations: H(H) = 0,
    rk JH <= max(n - 2, 1), and JH nilpotent."""
    H = as_map(H)
    if H.homogeneous_degree() is None:
        raise PreconditionError("map is not homogeneous of a single degree")
    n = len(H)
    if H.is_zero():
        return HomogeneousChecks(True, 0, max(n - 2, 1), True)
    _require_qt(H)
    xs = _xvars(H)
    J = jacobian(H, xs)
    HH = H.substitute(dict(zip(xs, H)))
    return HomogeneousChecks(HH.is_zero(), rank_ff(J), max(n - 2, 1), is_nilpotent(J))


def linear_invariants(H) -> list[Poly]:
    """Basis of the linear forms l in x with l(H) = 0, each checked as an invariant."""
    H = as_map(H)
    _require_qt(H)
    xs = _xvars(H)
    out = []
    for rel in linear_relations(H):
        l = rel.R.substitute({f"y{k + 1}": Poly.var(H.ctx, v) for k, v in enumerate(xs)})
        if not is_invariant(l, H):
            raise TheoremViolation(f"linear relation {rel.R} is not an invariant")
        out.append(l)
    return out
