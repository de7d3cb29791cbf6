"""Degree-bounded search for algebraic relations R(H) = 0.

Every search is plain exact linear algebra: the unknowns are the
coefficients ``c_alpha`` of a candidate relation, and each x-monomial of
``sum c_alpha * H**alpha`` contributes one equation.  No Groebner bases.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb

from .errors import PreconditionError, ResourceCapExceeded, TheoremViolation
from .poly import NEG_INF, Poly, PolyMap, VarContext
from .scalar import Scalar

log = logging.getLogger(__name__)

DEFAULT_ENTRY_CAP = 200_000


@dataclass(frozen=True)
class Relation:
    """A polynomial ``R`` in y1..yn with ``R(H) = 0``."""

    R: Poly
    degree: int
    certified: bool = False

    @classmethod
    def build(cls, R: Poly, H: PolyMap) -> "Relation":
        """Normalize ``R`` to be monic and check ``R(H) = 0`` from scratch."""
        if not R:
            raise ValueError("a relation must be nonzero")
        R = R.monic()
        ok = R.compose(list(H)).is_zero()
        return cls(R, R.degree(), ok)

    def holds_on(self, H: PolyMap) -> bool:
        return self.R.compose(list(H)).is_zero()

    def __str__(self):
        return str(self.R)


@dataclass
class RelationBasis:
    generators: list[Relation]
    degree_bound: int
    minimal_degree: int | None
    homogeneous: bool
    # relation-space dimension per degree: of the degree-d part when
    # homogeneous, of the degree <= d space otherwise
    dims: dict[int, int] = field(default_factory=dict)
    entries: int = 0

    def of_degree(self, d: int) -> list[Relation]:
        return [r for r in self.generators if r.degree == d]

    def minimal(self) -> list[Relation]:
        if self.minimal_degree is None:
            return []
        return self.of_degree(self.minimal_degree)


def exponents_of_degree(n: int, d: int):
    """All exponent vectors of total degree ``d`` in ``n`` variables, descending lex."""
    if n == 0:
        if d == 0:
            yield ()
        return
    if n == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in exponents_of_degree(n - 1, d - a):
            yield (a,) + rest


def exponents_up_to(n: int, d: int):
    """Exponent vectors with total degree <= d, descending graded-lex."""
    for k in range(d, -1, -1):
        yield from exponents_of_degree(n, k)


class _PowerTable:
    """Memoized products ``H**alpha``."""

    def __init__(self, H: PolyMap):
        self.H = H
        self.cache = {(0,) * len(H): Poly.const(H.ctx, 1)}

    def __call__(self, alpha):
        p = self.cache.get(alpha)
        if p is None:
            k = max(i for i, a in enumerate(alpha) if a)
            prev = alpha[:k] + (alpha[k] - 1,) + alpha[k + 1:]
            p = self(prev) * self.H[k]
            self.cache[alpha] = p
        return p


class _DependencyFinder:
    """Incremental echelon form over columns; collects linear dependencies.

    Each added vector is reduced by leading monomial against the stored
    pivots; a vector reducing to zero yields the combination of column
    indices that vanishes.
    """

    def __init__(self):
        self.pivots = {}  # mono -> (vector, combo), vector monic at mono
        self.dependencies = []

    @staticmethod
    def _lead(v):
        return max(v, key=lambda e: (sum(e), e))

    def add(self, index: int, poly: Poly) -> bool:
        v = dict(poly.items())
        combo = {index: Scalar(1)}
        while v:
            m = self._lead(v)
            entry = self.pivots.get(m)
            if entry is None:
                inv = v[m].inverse()
                v = {e: c * inv for e, c in v.items()}
                combo = {j: c * inv for j, c in combo.items()}
                self.pivots[m] = (v, combo)
                return False
            f = v[m]
            pv, pc = entry
            for e, c in pv.items():
                nv = v.get(e)
                nv = -(f * c) if nv is None else nv - f * c
                if nv:
                    v[e] = nv
                else:
                    v.pop(e, None)
            for j, c in pc.items():
                nc = combo.get(j)
                nc = -(f * c) if nc is None else nc - f * c
                if nc:
                    combo[j] = nc
                else:
                    combo.pop(j, None)
        self.dependencies.append(combo)
        return True


def rref_rows(rows: list[dict[int, Scalar]]) -> list[dict[int, Scalar]]:
    """Reduced row echelon form of sparse rows; column order is index order."""
    rows = [dict(r) for r in rows if r]
    done = []
    while rows:
        col = min(min(r) for r in rows)
        k = next(i for i, r in enumerate(rows) if col in r)
        piv = rows.pop(k)
        inv = piv[col].inverse()
        piv = {j: c * inv for j, c in piv.items()}
        for r in rows + done:
            f = r.get(col)
            if not f:
                continue
            for j, c in piv.items():
                nc = r.get(j)
                nc = -(f * c) if nc is None else nc - f * c
                if nc:
                    r[j] = nc
                else:
                    r.pop(j, None)
        rows = [r for r in rows if r]
        done.append(piv)
    return done


def _nullspace(columns, power, cap: int, entries: int):
    finder = _DependencyFinder()
    for idx, alpha in enumerate(columns):
        p = power(alpha)
        entries += len(p)
        if entries > cap:
            raise ResourceCapExceeded(
                f"relation system exceeds {cap} entries (degree {sum(alpha)})", entries, cap
            )
        finder.add(idx, p)
    return rref_rows(finder.dependencies), entries


def _to_relations(vectors, columns, ctx: VarContext, H: PolyMap) -> list[Relation]:
    out = []
    for vec in vectors:
        R = Poly(ctx, {columns[j]: c for j, c in vec.items()})
        rel = Relation.build(R, H)
        if not rel.certified:
            raise TheoremViolation(f"nullspace vector {R} does not vanish on H")
        out.append(rel)
    return out


def linear_relations(H: PolyMap) -> list[Relation]:
    """Basis of the linear forms ``sum c_i y_i`` vanishing on H, in RREF."""
    H = H if isinstance(H, PolyMap) else PolyMap(H)
    n = len(H)
    Y = VarContext.y(n)
    columns = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    finder = _DependencyFinder()
    for idx, comp in enumerate(H):
        finder.add(idx, comp)
    return _to_relations(rref_rows(finder.dependencies), columns, Y, H)


def _estimate_entries(n: int, m: int, D: int, d: int, homogeneous: bool) -> int:
    unknowns = comb(n + d - 1, d) if homogeneous else comb(n + d, d)
    if D <= 0:
        return unknowns
    rows = comb(m + d * D - 1, d * D) if homogeneous else comb(m + d * D, d * D)
    return unknowns * rows


def _homogeneous_mode(H: PolyMap) -> bool:
    d = H.homogeneous_degree()
    return d is not None and d is not NEG_INF and d >= 1


def default_dmax(H: PolyMap, cap: int = DEFAULT_ENTRY_CAP, ceiling: int = 12) -> int:
    """Largest degree whose (estimated) linear system stays below ``cap`` entries."""
    homog = _homogeneous_mode(H)
    D = H.degree()
    D = 0 if D is NEG_INF else D
    d = 1
    while d < ceiling and _estimate_entries(len(H), len(H.ctx), D, d + 1, homog) <= cap:
        d += 1
    return d


def find_relations(H: PolyMap, dmax: int | None = None, cap: int = DEFAULT_ENTRY_CAP) -> RelationBasis:
    """All relations of degree <= dmax, with the minimal degree found.

    When the components of H share one positive degree, only homogeneous
    relations are searched (the relation ideal is graded in that case).
    """
    H = H if isinstance(H, PolyMap) else PolyMap(H)
    if dmax is None:
        dmax = default_dmax(H, cap)
    if dmax < 1:
        raise PreconditionError("dmax must be at least 1")
    n = len(H)
    Y = VarContext.y(n)
    power = _PowerTable(H)
    homog = _homogeneous_mode(H)
    generators: list[Relation] = []
    dims: dict[int, int] = {}
    entries = 0
    if homog:
        for d in range(1, dmax + 1):
            columns = list(exponents_of_degree(n, d))
            vecs, entries = _nullspace(columns, power, cap, entries)
            dims[d] = len(vecs)
            generators += _to_relations(vecs, columns, Y, H)
    else:
        columns = list(exponents_up_to(n, dmax))
        # feed columns in increasing degree so nullities per bound can be read off
        order = sorted(range(len(columns)), key=lambda j: (sum(columns[j]), j))
        finder = _DependencyFinder()
        last_of_degree = {}
        for pos, j in enumerate(order):
            last_of_degree[sum(columns[j])] = pos
        for pos, j in enumerate(order):
            p = power(columns[j])
            entries += len(p)
            if entries > cap:
                raise ResourceCapExceeded(
                    f"relation system exceeds {cap} entries (degree {sum(columns[j])})", entries, cap
                )
            finder.add(j, p)
            d = sum(columns[j])
            if pos == last_of_degree[d] and d >= 1:
                dims[d] = len(finder.dependencies)
        vecs = rref_rows(finder.dependencies)
        generators = _to_relations(vecs, columns, Y, H)
        generators.sort(key=lambda r: r.degree)
    minimal = next((d for d in range(1, dmax + 1) if dims.get(d)), None)
    log.debug("find_relations: dims=%s entries=%d", dims, entries)
    return RelationBasis(generators, dmax, minimal, homog, dims, entries)


def reduce_mod_linear(R, linear) -> Poly:
    """Remainder of ``R`` after eliminating one y-variable per (affine) linear form."""
    R = R.R if isinstance(R, Relation) else R
    forms = [l.R if isinstance(l, Relation) else l for l in linear]
    if not forms:
        return R
    ctx = R.ctx
    n = len(ctx)
    rows = []
    for f in forms:
        f = f.embed(ctx)
        if f.degree() != 1:
            raise PreconditionError(f"{f} is not a linear form")
        row = {}
        for e, c in f.items():
            if sum(e) == 1:
                row[e.index(1)] = c
            else:
                row[n] = c  # constant term sorts after every variable
        rows.append(row)
    echelon = rref_rows(rows)
    if len(echelon) != len(rows) or any(min(r) == n for r in echelon):
        raise PreconditionError("linear forms are dependent")
    assignment = {}
    for r in echelon:
        k = min(r)
        img = Poly.zero(ctx)
        for j, c in r.items():
            if j == k:
                continue
            img = img - (Poly.const(ctx, c) if j == n else Poly.var(ctx, j).scale(c))
        assignment[ctx.names[k]] = img
    return R.substitute(assignment)
