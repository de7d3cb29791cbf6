"""Multivariate gcd over QQ(i).

Recursive content / primitive-part reduction; the primitive parts are
combined with the subresultant PRS in the highest-index variable present.
No factorization is involved.
"""

from __future__ import annotations

from collections.abc import Iterable

from .errors import PreconditionError
from .poly import Poly, common_context


def coefficients_in(p: Poly, k: int) -> dict[int, Poly]:
    """Coefficients of ``p`` viewed as a univariate polynomial in variable ``k``."""
    out: dict[int, dict] = {}
    for e, c in p.items():
        a = e[k]
        out.setdefault(a, {})[e[:k] + (0,) + e[k + 1:]] = c
    return {a: Poly._make(p.ctx, t) for a, t in out.items()}


def _deg(p: Poly, k: int) -> int:
    return max(e[k] for e, _ in p.items())


def _lc(p: Poly, k: int) -> Poly:
    d = _deg(p, k)
    return Poly._make(p.ctx, {e[:k] + (0,) + e[k + 1:]: c for e, c in p.items() if e[k] == d})


def _shift(p: Poly, k: int, m: int) -> Poly:
    if not m:
        return p
    return Poly._make(p.ctx, {e[:k] + (e[k] + m,) + e[k + 1:]: c for e, c in p.items()})


def prem(a: Poly, b: Poly, k: int) -> Poly:
    """Pseudo-remainder of ``a`` by ``b`` with respect to variable ``k``."""
    db = _deg(b, k)
    lcb = _lc(b, k)
    r = a
    e = _deg(a, k) - db + 1
    while r and _deg(r, k) >= db:
        dr = _deg(r, k)
        r = lcb * r - _shift(_lc(r, k) * b, k, dr - db)
        e -= 1
    return r if e <= 0 else (lcb**e) * r


def _used_vars(p: Poly) -> set[int]:
    used = set()
    for e, _ in p.items():
        used.update(k for k, a in enumerate(e) if a)
    return used


def content_in(p: Poly, k: int) -> Poly:
    g = None
    for c in coefficients_in(p, k).values():
        g = c if g is None else _gcd(g, c)
        if g.is_constant():
            return Poly.const(p.ctx, 1)
    return g


def _gcd(a: Poly, b: Poly) -> Poly:
    """A gcd of two nonzero polynomials, up to a unit."""
    if a.is_constant() or b.is_constant():
        return Poly.const(a.ctx, 1)
    ua, ub = _used_vars(a), _used_vars(b)
    k = max(ua | ub)
    if k not in ua:
        return _gcd(a, content_in(b, k))
    if k not in ub:
        return _gcd(content_in(a, k), b)
    ca, cb = content_in(a, k), content_in(b, k)
    pa, pb = a.div_exact(ca), b.div_exact(cb)
    return _gcd(ca, cb) * _primitive_prs_gcd(pa, pb, k)


def _primitive_prs_gcd(a: Poly, b: Poly, k: int) -> Poly:
    """Gcd of two polynomials primitive in variable ``k`` (subresultant PRS)."""
    if _deg(a, k) < _deg(b, k):
        a, b = b, a
    one = Poly.const(a.ctx, 1)
    g = h = one
    while True:
        delta = _deg(a, k) - _deg(b, k)
        r = prem(a, b, k)
        if not r:
            break
        if _deg(r, k) == 0:
            return one
        a, b = b, r.div_exact(g * h**delta)
        g = _lc(a, k)
        if delta == 1:
            h = g
        elif delta > 1:
            h = (g**delta).div_exact(h ** (delta - 1))
    return b.div_exact(content_in(b, k))


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of ``a`` and ``b`` (``gcd(0, 0)`` is rejected)."""
    return gcd_many([a, b])


def gcd_many(ps: Iterable[Poly]) -> Poly:
    """Monic gcd of a list of polynomials, not all zero."""
    ps = list(ps)
    nonzero = [p for p in ps if p]
    if not nonzero:
        raise PreconditionError("gcd of an all-zero list is undefined")
    ctx = nonzero[0].ctx
    for p in nonzero[1:]:
        ctx = common_context(ctx, p.ctx)
    nonzero = sorted((p.embed(ctx) for p in nonzero), key=len)
    g = nonzero[0]
    for p in nonzero[1:]:
        if g.is_constant():
            break
        g = _gcd(g, p)
    return g.monic()
