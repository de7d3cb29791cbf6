from __future__ import annotations

import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from qtrans.parse import parse_list, parse_poly
from qtrans.poly import Poly, PolyMap, VarContext
from qtrans.scalar import Scalar

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

X5 = VarContext.x(5)

A1 = "[x4^2, x4*x5, x1*x5 - x2*x4, 0, 0]"
A2 = ("[x5^2*(a*x1 - x5^2*x2), a*(a*x1 - x5^2*x2), "
      "x5^2*(a*x3 - x5^2*x4), a*(a*x3 - x5^2*x4), 0]")
B = "[x5^5, b*x5^3, b^2*x5, -b^2*x1 + 2*b*x2*x5^2 - x3*x5^4, 0]"
CUBIC = "x1*x4^2 + x2*x4*x5 + x3*x5^2"


def P(text, ctx=X5, **names):
    return parse_poly(text, ctx, names)


def M(text, ctx=X5, **names):
    return PolyMap(parse_list(text, ctx, names), ctx=ctx)


def map_a1():
    return M(A1)


def map_a2():
    return M(A2, a=P("x1*x4 - x2*x3"))


def poly_b():
    return P("x1*x3 - x2^2 + x4*x5")


def map_b():
    return M(B, b=poly_b())


def example_maps():
    return {"a1": map_a1(), "a2": map_a2(), "b": map_b()}


@pytest.fixture(scope="session")
def maps():
    return example_maps()


def random_invertible(rng: random.Random, n: int, lo: int = -2, hi: int = 2, shears: int | None = None):
    """A random invertible integer matrix.

    By default a row-permuted product of unit lower and upper triangular
    matrices (dense).  With ``shears=k`` a permutation matrix with ``k``
    random elementary shears added, which keeps conjugates of high-degree
    maps sparse.
    """
    perm = list(range(n))
    rng.shuffle(perm)
    if shears is not None:
        T = [[Scalar(int(perm[r] == c)) for c in range(n)] for r in range(n)]
        for _ in range(shears):
            i, j = rng.sample(range(n), 2)
            c = Scalar(rng.choice([v for v in range(lo, hi + 1) if v]))
            # row_i += c * row_j keeps the determinant
            T[i] = [a + c * b for a, b in zip(T[i], T[j])]
        return T
    L = [[Scalar(1) if i == j else (Scalar(rng.randint(lo, hi)) if j < i else Scalar(0))
          for j in range(n)] for i in range(n)]
    U = [[Scalar(1) if i == j else (Scalar(rng.randint(lo, hi)) if j > i else Scalar(0))
          for j in range(n)] for i in range(n)]
    prod = [[sum((L[i][k] * U[k][j] for k in range(n)), Scalar(0)) for j in range(n)] for i in range(n)]
    return [prod[p] for p in perm]


def random_poly(rng: random.Random, ctx: VarContext, degree: int, density: float = 0.5,
                lo: int = -3, hi: int = 3, homogeneous: bool = False) -> Poly:
    from qtrans.relations import exponents_of_degree, exponents_up_to

    n = len(ctx)
    exps = list(exponents_of_degree(n, degree)) if homogeneous else list(exponents_up_to(n, degree))
    terms = {}
    for e in exps:
        if rng.random() < density:
            terms[e] = Scalar(rng.randint(lo, hi))
    return Poly(ctx, terms)


# -- hypothesis strategies --------------------------------------------------

small_ints = st.integers(min_value=-4, max_value=4)
scalars = st.builds(lambda a, b, c, d: Scalar(a, 0) / Scalar(c) + Scalar(0, b) / Scalar(d),
                    small_ints, small_ints,
                    st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3))


def polys(ctx: VarContext, max_degree: int = 3, max_terms: int = 5, coeffs=scalars):
    n = len(ctx)
    exps = st.tuples(*[st.integers(min_value=0, max_value=max_degree) for _ in range(n)]).filter(
        lambda e: sum(e) <= max_degree)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda t: Poly(ctx, t))


def pipeline_map():
    return M("[x5^2, -2*x4*x5, x4^2, 0, 0]")


NON_QT = [
    "[x1, x2, x3, x4, x5]",
    "[x2, x1, 0, 0, 0]",
    "[x2^2, x1, 0, 0, 0]",
    "[x4^2 + x1, x4*x5, x1*x5 - x2*x4, 0, 0]",
    "[x1*x2, x2*x3, x3*x1, 0, 0]",
    "[x5^2, -2*x4*x5, x4^2, x1, 0]",
    "[x5^5, x5^3*x1, 0, 0, 0]",
]

SCALINGS = {"a1": "x4", "a2": "x5^2", "b": "x1*x3 - x2^2 + x4*x5"}


def qt_corpus(seed: int = 7):
    """(label, H, expected quasi-translation) triples, at least 20 of them."""
    from qtrans.qt import qt_conjugate_linear

    rng = random.Random(seed)
    base = example_maps()
    out = [(k, H, True) for k, H in base.items()]
    out.append(("pipeline", pipeline_map(), True))
    out.append(("triangular", M("[x2^2, 0, 0, 0, 0]"), True))
    # dense conjugators for the quadratic map, sparse ones for the quintics
    for k, name in enumerate(["a1", "a2", "b", "a1", "b"]):
        T = random_invertible(rng, 5) if name == "a1" else random_invertible(rng, 5, shears=1)
        out.append((f"{name}^T{k}", qt_conjugate_linear(base[name], T), True))
    for name, g in SCALINGS.items():
        out.append((f"({g})*{name}", base[name].scale(P(g)), True))
    out += [(f"nonqt{k}", M(t), False) for k, t in enumerate(NON_QT)]
    return out


def generated_singular_hessians(count: int = 24, seed: int = 11):
    """Homogeneous h in n <= 4 variables written in at most n - 1 linear forms."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, 4)
        X = VarContext.x(n)
        k = rng.randint(1, n - 1)
        forms = [random_poly(rng, X, 1, 0.8, homogeneous=True) for _ in range(k)]
        Y = VarContext.y(k)
        f = random_poly(rng, Y, rng.randint(2, 3), 0.6, homogeneous=True)
        h = f.compose(forms)
        if h and h.is_homogeneous():
            out.append(h)
    return out
