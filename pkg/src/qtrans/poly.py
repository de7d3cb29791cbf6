"""Sparse multivariate polynomials over QQ(i).

A :class:`Poly` is a map from exponent tuples to nonzero :class:`Scalar`
coefficients inside a :class:`VarContext`.  Terms are ordered graded
lexicographically with the context's declared variable order, so ``x1 > x2 >
... `` and all "leading term" / "monic" notions refer to that order.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Mapping, Sequence
from functools import total_ordering
from operator import add

from gmpy2 import mpq

from .errors import ContextError, NotDivisible
from .scalar import ONE, Scalar

__all__ = [
    "NEG_INF",
    "VarContext",
    "Poly",
    "PolyMap",
    "partial_derivative",
    "substitute",
    "homogeneous_components",
    "degree_in",
    "common_context",
]


@total_ordering
class _NegInf:
    """Degree of the zero polynomial; compares below every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf-degree")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "-inf"

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


class VarContext:
    """An ordered tuple of distinct variable names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate variable names in {names}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {v: k for k, v in enumerate(names)})

    def __setattr__(self, name, value):
        raise AttributeError("VarContext is immutable")

    @classmethod
    def x(cls, n: int) -> "VarContext":
        return cls(f"x{k}" for k in range(1, n + 1))

    @classmethod
    def y(cls, n: int) -> "VarContext":
        return cls(f"y{k}" for k in range(1, n + 1))

    def adjoin(self, *names: str) -> "VarContext":
        return VarContext(self.names + names)

    def index(self, name) -> int:
        if isinstance(name, int):
            if not 0 <= name < len(self.names):
                raise ContextError(f"variable index {name} out of range")
            return name
        try:
            return self._index[name]
        except KeyError:
            raise ContextError(f"unknown variable {name!r} in context {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other):
        return isinstance(other, VarContext) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarContext({', '.join(self.names)})"

    def is_prefix_of(self, other: "VarContext") -> bool:
        return other.names[: len(self.names)] == self.names


def common_context(a: VarContext, b: VarContext) -> VarContext:
    if a is b or a == b:
        return a
    if a.is_prefix_of(b):
        return b
    if b.is_prefix_of(a):
        return a
    raise ContextError(f"incompatible contexts {a.names} and {b.names}")


def _grlex_key(e):
    return (sum(e), e)


def _coerce_scalar(c) -> Scalar:
    return c if isinstance(c, Scalar) else Scalar.coerce(c)


class Poly:
    """Immutable sparse polynomial in a fixed variable context."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping | None = None):
        n = len(ctx)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n or any(k < 0 for k in e):
                raise ValueError(f"bad exponent vector {e} for context of size {n}")
            c = _coerce_scalar(c)
            if c:
                clean[e] = clean[e] + c if e in clean else c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "_terms", {e: c for e, c in clean.items() if c})
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _make(cls, ctx, terms):
        p = object.__new__(cls)
        object.__setattr__(p, "ctx", ctx)
        object.__setattr__(p, "_terms", terms)
        object.__setattr__(p, "_hash", None)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls._make(ctx, {})

    @classmethod
    def const(cls, ctx, c):
        c = _coerce_scalar(c)
        return cls._make(ctx, {(0,) * len(ctx): c} if c else {})

    @classmethod
    def var(cls, ctx, name):
        k = ctx.index(name)
        e = [0] * len(ctx)
        e[k] = 1
        return cls._make(ctx, {tuple(e): ONE})

    @classmethod
    def monomial(cls, ctx, exps, c=1):
        return cls(ctx, {tuple(exps): c})

    @classmethod
    def gens(cls, ctx):
        return [cls.var(ctx, v) for v in ctx.names]

    # -- inspection -------------------------------------------------------
    def terms(self):
        """Terms as ``(exponents, coefficient)`` pairs, leading term first."""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def items(self):
        return self._terms.items()

    def coeff(self, exps) -> Scalar:
        return self._terms.get(tuple(exps), Scalar(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.coeff((0,) * len(self.ctx))

    @property
    def is_real(self) -> bool:
        return all(not c.im for c in self._terms.values())

    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def degree_in(self, variables) -> int:
        if isinstance(variables, (str, int)):
            variables = [variables]
        idx = [self.ctx.index(v) for v in variables]
        if not self._terms:
            return NEG_INF
        return max(sum(e[k] for k in idx) for e in self._terms)

    def variables(self) -> list[str]:
        """Names of the variables that occur in some term."""
        used = [False] * len(self.ctx)
        for e in self._terms:
            for k, a in enumerate(e):
                if a:
                    used[k] = True
        return [v for v, u in zip(self.ctx.names, used) if u]

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def homogeneous_components(self):
        parts = {}
        for e, c in self._terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return [(d, Poly._make(self.ctx, parts[d])) for d in sorted(parts)]

    def leading_term(self):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=_grlex_key)
        return e, self._terms[e]

    def leading_coefficient(self) -> Scalar:
        return self.leading_term()[1]

    def monic(self) -> "Poly":
        if not self._terms:
            return self
        lc = self.leading_coefficient()
        if lc == 1:
            return self
        return self.scale(lc.inverse())

    # -- context handling -------------------------------------------------
    def embed(self, ctx: VarContext) -> "Poly":
        """The same polynomial viewed in ``ctx`` (which must contain every variable)."""
        if ctx == self.ctx:
            return self
        if self.ctx.is_prefix_of(ctx):
            pad = (0,) * (len(ctx) - len(self.ctx))
            return Poly._make(ctx, {e + pad: c for e, c in self._terms.items()})
        positions = []
        for k, name in enumerate(self.ctx.names):
            if name in ctx:
                positions.append(ctx.index(name))
            elif any(e[k] for e in self._terms):
                raise ContextError(f"variable {name!r} not present in {ctx.names}")
            else:
                positions.append(None)
        n = len(ctx)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * n
            for k, a in enumerate(e):
                if a:
                    ne[positions[k]] = a
            out[tuple(ne)] = c
        return Poly._make(ctx, out)

    def _lift(self, other):
        if isinstance(other, Poly):
            ctx = common_context(self.ctx, other.ctx)
            return self.embed(ctx), other.embed(ctx)
        try:
            c = _coerce_scalar(other)
        except TypeError:
            return None, None
        return self, Poly.const(self.ctx, c)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        if len(a._terms) < len(b._terms):
            a, b = b, a
        out = dict(a._terms)
        for e, c in b._terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                s = v + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._make(a.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._make(self.ctx, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return b + (-a)

    def scale(self, c) -> "Poly":
        c = _coerce_scalar(c)
        if not c:
            return Poly.zero(self.ctx)
        return Poly._make(self.ctx, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        a, b = self._lift(other)
        if not a._terms or not b._terms:
            return Poly.zero(a.ctx)
        return Poly._make(a.ctx, _mul_terms(a._terms, b._terms))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = Poly.const(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def div_exact(self, other: "Poly") -> "Poly":
        """Quotient ``self / other``; raises :class:`NotDivisible` on a remainder."""
        a, b = self._lift(other)
        if not b._terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not a._terms:
            return Poly.zero(a.ctx)
        if len(b._terms) == 1:
            (be, bc), = b._terms.items()
            inv = bc.inverse()
            out = {}
            for e, c in a._terms.items():
                d = tuple(x - y for x, y in zip(e, be))
                if min(d) < 0:
                    raise NotDivisible("monomial does not divide")
                out[d] = c * inv
            return Poly._make(a.ctx, out)
        lt_e, lt_c = b.leading_term()
        inv = lt_c.inverse()
        bterms = [(e, c) for e, c in b._terms.items() if e != lt_e]
        rem = dict(a._terms)
        heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
        heapq.heapify(heap)
        quo = {}
        while heap:
            _, ne = heapq.heappop(heap)
            e = tuple(-x for x in ne)
            c = rem.pop(e, None)
            if c is None:
                continue
            d = tuple(x - y for x, y in zip(e, lt_e))
            if min(d) < 0:
                raise NotDivisible("leading term does not divide")
            qc = c * inv
            quo[d] = qc
            for be, bc in bterms:
                te = tuple(map(add, d, be))
                v = rem.get(te)
                if v is None:
                    rem[te] = -(qc * bc)
                    heapq.heappush(heap, (-sum(te), tuple(-x for x in te)))
                else:
                    nv = v - qc * bc
                    if nv:
                        rem[te] = nv
                    else:
                        del rem[te]
        return Poly._make(a.ctx, quo)

    def divides(self, other: "Poly") -> bool:
        try:
            other.div_exact(self)
        except NotDivisible:
            return False
        return True

    # -- calculus / substitution -----------------------------------------
    def partial(self, var) -> "Poly":
        k = self.ctx.index(var)
        out = {}
        for e, c in self._terms.items():
            a = e[k]
            if a:
                ne = e[:k] + (a - 1,) + e[k + 1:]
                out[ne] = c * a
        return Poly._make(self.ctx, out)

    def gradient(self, variables=None) -> "PolyMap":
        variables = self.ctx.names if variables is None else variables
        return PolyMap([self.partial(v) for v in variables], ctx=self.ctx)

    def substitute(self, assignment: Mapping, ctx: VarContext | None = None) -> "Poly":
        """Replace variables by polynomials (or scalars).

        Unassigned variables are kept and looked up by name in the target
        context, which defaults to the common context of the images (or the
        polynomial's own context when no image is a polynomial).
        """
        images = {}
        target = ctx
        for var, img in assignment.items():
            k = self.ctx.index(var)
            images[k] = img
            if isinstance(img, Poly):
                target = img.ctx if target is None else common_context(target, img.ctx)
        if target is None:
            target = self.ctx
        full = []
        for k, name in enumerate(self.ctx.names):
            if k in images:
                img = images[k]
                full.append(img.embed(target) if isinstance(img, Poly) else Poly.const(target, img))
            elif name in target:
                full.append(Poly.var(target, name))
            else:
                full.append(None)
        return _evaluate(self, full, target)

    def compose(self, images: Sequence) -> "Poly":
        """``p(images[0], images[1], ...)``; one image per context variable."""
        if len(images) != len(self.ctx):
            raise ContextError(f"expected {len(self.ctx)} images, got {len(images)}")
        return self.substitute(dict(zip(self.ctx.names, images)))

    def eval_scalars(self, values: Sequence) -> Scalar:
        """Evaluate at a point of QQ(i)^n."""
        vals = [_coerce_scalar(v) for v in values]
        total = Scalar(0)
        for e, c in self._terms.items():
            t = c
            for v, a in zip(vals, e):
                if a:
                    t = t * v**a
            total = total + t
        return total

    # -- comparison / hashing / display ----------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            if self.ctx == other.ctx:
                return self._terms == other._terms
            try:
                a, b = self._lift(other)
            except ContextError:
                return False
            return a._terms == b._terms
        try:
            c = _coerce_scalar(other)
        except TypeError:
            return NotImplemented
        if not c:
            return not self._terms
        return self.is_constant() and len(self._terms) == 1 and self.constant_value() == c

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.ctx, frozenset(self._terms.items()))))
        return self._hash

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_poly(self)


def _mul_terms(ta, tb):
    if len(ta) < len(tb):
        ta, tb = tb, ta
    real = all(not c.im for c in ta.values()) and all(not c.im for c in tb.values())
    if real:
        acc = {}
        get = acc.get
        bl = [(e, c.re) for e, c in tb.items()]
        for e1, c1 in ta.items():
            r1 = c1.re
            for e2, r2 in bl:
                e = tuple(map(add, e1, e2))
                acc[e] = get(e, 0) + r1 * r2
        zero = mpq(0)
        return {e: Scalar._raw(v, zero) for e, v in acc.items() if v}
    acc = {}
    get = acc.get
    for e1, c1 in ta.items():
        for e2, c2 in tb.items():
            e = tuple(map(add, e1, e2))
            v = get(e)
            acc[e] = c1 * c2 if v is None else v + c1 * c2
    return {e: c for e, c in acc.items() if c}


def _evaluate(p: Poly, images: list, target: VarContext) -> Poly:
    """Sum over terms of coeff * prod(images[k] ** e[k])."""
    powers = [dict() for _ in images]

    def power(k, a):
        cache = powers[k]
        if a not in cache:
            if images[k] is None:
                raise ContextError(
                    f"variable {p.ctx.names[k]!r} has no image in {target.names}"
                )
            cache[a] = images[k] if a == 1 else power(k, a - 1) * images[k]
        return cache[a]

    out = {}
    for e, c in p._terms.items():
        term = None
        for k, a in enumerate(e):
            if a:
                f = power(k, a)
                term = f if term is None else term * f
        if term is None:
            term = Poly.const(target, c)
        else:
            term = term.scale(c)
        for te, tc in term._terms.items():
            v = out.get(te)
            out[te] = tc if v is None else v + tc
    return Poly._make(target, {e: c for e, c in out.items() if c})


# -- module-level operations ----------------------------------------------

def partial_derivative(p: Poly, var) -> Poly:
    return p.partial(var)


def substitute(p: Poly, assignment: Mapping, ctx: VarContext | None = None) -> Poly:
    return p.substitute(assignment, ctx)


def homogeneous_components(p: Poly):
    return p.homogeneous_components()


def degree_in(p: Poly, variables):
    return p.degree_in(variables)


# -- formatting -------------------------------------------------------------

def _mono_str(ctx, e):
    parts = []
    for name, a in zip(ctx.names, e):
        if a == 1:
            parts.append(name)
        elif a:
            parts.append(f"{name}^{a}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    """Render in the grammar accepted by :func:`qtrans.parse.parse_poly`."""
    if not p._terms:
        return "0"
    chunks = []
    for e, c in p.terms():
        mono = _mono_str(p.ctx, e)
        if c.im and c.re:
            sign, body = "+", f"({c})"
        elif c.im:
            sign = "-" if c.im < 0 else "+"
            mag = abs(c.im)
            body = "i" if mag == 1 else f"{mag}*i"
        else:
            sign = "-" if c.re < 0 else "+"
            mag = abs(c.re)
            body = "" if (mag == 1 and mono) else str(mag)
        text = "*".join(s for s in (body, mono) if s)
        chunks.append((sign, text))
    first_sign, first = chunks[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in chunks[1:]:
        out += f" {sign} {text}"
    return out


class PolyMap(Sequence):
    """An ordered tuple of polynomials in one shared context.

    Represents the ``H`` in a map ``x + H``.
    """

    __slots__ = ("ctx", "components")

    def __init__(self, components: Iterable, ctx: VarContext | None = None):
        comps = list(components)
        if ctx is None:
            for c in comps:
                if isinstance(c, Poly):
                    ctx = c.ctx if ctx is None else common_context(ctx, c.ctx)
            if ctx is None:
                raise ContextError("cannot infer a context for a map without polynomial entries")
        comps = tuple(c.embed(ctx) if isinstance(c, Poly) else Poly.const(ctx, c) for c in comps)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMap is immutable")

    @classmethod
    def identity(cls, ctx: VarContext, n: int | None = None) -> "PolyMap":
        n = len(ctx) if n is None else n
        return cls([Poly.var(ctx, k) for k in range(n)], ctx=ctx)

    @classmethod
    def zeros(cls, ctx: VarContext, n: int | None = None) -> "PolyMap":
        n = len(ctx) if n is None else n
        return cls([Poly.zero(ctx)] * n, ctx=ctx)

    @property
    def n(self) -> int:
        return len(self.components)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return PolyMap(self.components[k], ctx=self.ctx)
        return self.components[k]

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        if isinstance(other, PolyMap):
            return len(self) == len(other) and all(a == b for a, b in zip(self, other))
        if isinstance(other, (list, tuple)):
            return len(self) == len(other) and all(a == b for a, b in zip(self, other))
        return NotImplemented

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"PolyMap([{', '.join(str(c) for c in self.components)}])"

    __str__ = __repr__

    def embed(self, ctx):
        return PolyMap([c.embed(ctx) for c in self.components], ctx=ctx)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def degree(self):
        return max((c.degree() for c in self.components), default=NEG_INF)

    def homogeneous_degree(self):
        """Common degree of the nonzero components, ``NEG_INF`` for the zero map,
        ``None`` when the map is not homogeneous of a single degree."""
        degs = set()
        for c in self.components:
            if c.is_zero():
                continue
            if not c.is_homogeneous():
                return None
            degs.add(c.degree())
        if not degs:
            return NEG_INF
        return degs.pop() if len(degs) == 1 else None

    def scale(self, g) -> "PolyMap":
        return PolyMap([c * g for c in self.components])

    def __add__(self, other):
        if len(other) != len(self):
            raise ValueError("map lengths differ")
        return PolyMap([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        if len(other) != len(self):
            raise ValueError("map lengths differ")
        return PolyMap([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return PolyMap([-c for c in self.components], ctx=self.ctx)

    def substitute(self, assignment, ctx=None) -> "PolyMap":
        return PolyMap([c.substitute(assignment, ctx) for c in self.components])

    def compose(self, images: Sequence) -> "PolyMap":
        """``H(images)``: substitute ``images[k]`` for the k-th context variable."""
        return PolyMap([c.compose(images) for c in self.components])
