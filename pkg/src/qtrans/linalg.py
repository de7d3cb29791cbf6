"""Dense matrices over the polynomial ring.

Determinant and rank are computed by fraction-free (Bareiss) elimination, so
every intermediate entry stays a polynomial and each division is exact.
"""

from __future__ import annotations

from collections.abc import Sequence

from .errors import PreconditionError
from .poly import Poly, PolyMap, VarContext, common_context
from .scalar import Scalar


class PolyMatrix:
    """Rectangular matrix of polynomials sharing one context."""

    __slots__ = ("rows", "cols", "ctx", "entries")

    def __init__(self, entries: Sequence[Sequence], ctx: VarContext | None = None):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("a matrix needs at least one row and one column")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        if ctx is None:
            for r in rows:
                for e in r:
                    if isinstance(e, Poly):
                        ctx = e.ctx if ctx is None else common_context(ctx, e.ctx)
            if ctx is None:
                ctx = VarContext(())
        self.rows = len(rows)
        self.cols = cols
        self.ctx = ctx
        self.entries = tuple(
            tuple(e.embed(ctx) if isinstance(e, Poly) else Poly.const(ctx, e) for e in r) for r in rows
        )

    @classmethod
    def identity(cls, ctx: VarContext, n: int) -> "PolyMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ctx=ctx)

    @classmethod
    def zeros(cls, ctx: VarContext, rows: int, cols: int | None = None) -> "PolyMatrix":
        return cls([[0] * (rows if cols is None else cols) for _ in range(rows)], ctx=ctx)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.entries)
        return f"PolyMatrix([{body}])"

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([self.column(j) for j in range(self.cols)], ctx=self.ctx)

    def is_symmetric(self) -> bool:
        return self.is_square and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def is_constant(self) -> bool:
        return all(e.is_constant() for r in self.entries for e in r)

    def __add__(self, other):
        return PolyMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return PolyMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            cols = [other.column(j) for j in range(other.cols)]
            return PolyMatrix([[_dot(r, c) for c in cols] for r in self.entries])
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return PolyMap([_dot(r, vec) for r in self.entries], ctx=self.ctx)

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix([[e * c for e in r] for r in self.entries], ctx=self.ctx)

    def trace(self) -> Poly:
        if not self.is_square:
            raise PreconditionError("trace of a non-square matrix")
        total = Poly.zero(self.ctx)
        for i in range(self.rows):
            total = total + self[i, i]
        return total

    def scalars(self) -> list[list[Scalar]]:
        if not self.is_constant():
            raise PreconditionError("matrix has non-constant entries")
        return [[e.constant_value() for e in r] for r in self.entries]


def _dot(a, b) -> Poly:
    total = None
    for x, y in zip(a, b):
        if x and y:
            p = x * y
            total = p if total is None else total + p
    if total is None:
        ctx = a[0].ctx if isinstance(a[0], Poly) else b[0].ctx
        return Poly.zero(ctx)
    return total


def jacobian(H, variables=None) -> PolyMatrix:
    """Entry (i, j) is dH_i/dx_j; defaults to the first ``len(H)`` context variables."""
    H = H if isinstance(H, PolyMap) else PolyMap(H)
    if variables is None:
        variables = H.ctx.names[: len(H)] if len(H.ctx) >= len(H) else H.ctx.names
    return PolyMatrix([[h.partial(v) for v in variables] for h in H], ctx=H.ctx)


def hessian(h: Poly, variables=None) -> PolyMatrix:
    variables = h.ctx.names if variables is None else variables
    return jacobian(h.gradient(variables), variables)


def det(M: PolyMatrix) -> Poly:
    """Exact determinant by Bareiss elimination with first-nonzero pivoting."""
    if not M.is_square:
        raise PreconditionError(f"determinant of a {M.rows}x{M.cols} matrix")
    n = M.rows
    a = [list(r) for r in M.entries]
    sign = 1
    prev = Poly.const(M.ctx, 1)
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(M.ctx)
        p = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * p - a[i][k] * a[k][j]).div_exact(prev)
        prev = p
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def rank_ff(M: PolyMatrix) -> int:
    """Rank over the fraction field QQ(i)(x), by fraction-free elimination."""
    a = [list(r) for r in M.entries]
    rows, cols = M.rows, M.cols
    prev = Poly.const(M.ctx, 1)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        p = a[r][c]
        for i in range(r + 1, rows):
            f = a[i][c]
            for j in range(c + 1, cols):
                a[i][j] = (a[i][j] * p - f * a[r][j]).div_exact(prev)
            a[i][c] = Poly.zero(M.ctx)
        prev = p
        r += 1
    return r


def matrix_power(M: PolyMatrix, k: int) -> PolyMatrix:
    result = PolyMatrix.identity(M.ctx, M.rows)
    for _ in range(k):
        result = result @ M
    return result


def is_nilpotent(M: PolyMatrix) -> bool:
    """Nilpotency via trace(M^k) = 0 for k = 1..m (characteristic zero)."""
    if not M.is_square:
        raise PreconditionError("nilpotency test needs a square matrix")
    P = M
    for k in range(1, M.rows + 1):
        if P.trace():
            return False
        if k < M.rows:
            P = P @ M
    return True


def scalar_inverse(T) -> list[list[Scalar]]:
    """Inverse of a constant matrix over QQ(i) by Gauss-Jordan elimination."""
    rows = T.scalars() if isinstance(T, PolyMatrix) else [[Scalar.coerce(v) for v in r] for r in T]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise PreconditionError("only square matrices are invertible")
    a = [list(r) + [Scalar(1 if i == j else 0) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c]), None)
        if pivot is None:
            raise PreconditionError("matrix is singular")
        a[c], a[pivot] = a[pivot], a[c]
        inv = a[c][c].inverse()
        a[c] = [v * inv for v in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [v - f * w for v, w in zip(a[i], a[c])]
    return [r[n:] for r in a]
