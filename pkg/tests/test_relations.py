from __future__ import annotations

import random

import pytest

from qtrans.errors import PreconditionError, ResourceCapExceeded
from qtrans.parse import parse_poly
from qtrans.poly import PolyMap, VarContext
from qtrans.relations import (
    default_dmax,
    exponents_of_degree,
    exponents_up_to,
    find_relations,
    linear_relations,
    reduce_mod_linear,
)

from conftest import map_a1, map_a2, map_b, random_poly
from oracle import naive_relations, same_generators

X2 = VarContext.x(2)
Y5 = VarContext.y(5)


def test_exponent_enumeration():
    assert list(exponents_of_degree(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert len(list(exponents_up_to(3, 2))) == 10


def test_twisted_cubic_relation():
    H = PolyMap([parse_poly("x1^2", X2), parse_poly("x1^3", X2)], ctx=X2)
    basis = find_relations(H, 3)
    assert basis.minimal_degree == 3
    assert [str(r) for r in basis.minimal()] == ["y1^3 - y2^2"]
    assert all(r.certified for r in basis.generators)


def test_independent_components_have_no_relation():
    H = PolyMap([parse_poly("x1", X2), parse_poly("x2", X2)], ctx=X2)
    basis = find_relations(H, 4)
    assert basis.minimal_degree is None and basis.generators == []


def test_case_b_relations():
    basis = find_relations(map_b(), 3)
    assert basis.homogeneous
    assert basis.dims == {1: 1, 2: 6, 3: 19}
    assert str(basis.minimal()[0]) == "y5"


def test_case_a2_quadric():
    quad = [r for r in find_relations(map_a2(), 2).of_degree(2)]
    target = parse_poly("y1*y4 - y2*y3", Y5)
    assert any(reduce_mod_linear(r, linear_relations(map_a2())) == target for r in quad)


def test_linear_relations_of_a1():
    rels = linear_relations(map_a1())
    assert [str(r) for r in rels] == ["y4", "y5"]


def test_default_dmax_is_sane():
    assert 1 <= default_dmax(map_b()) <= 12


def test_cap_is_enforced():
    with pytest.raises(ResourceCapExceeded):
        find_relations(map_b(), 4, cap=100)


def test_dmax_must_be_positive():
    with pytest.raises(PreconditionError):
        find_relations(map_a1(), 0)


def test_reduce_mod_affine_form():
    R = parse_poly("y1*y2 + y3", VarContext.y(3))
    lin = [parse_poly("y1 - 2", VarContext.y(3))]
    assert reduce_mod_linear(R, lin) == parse_poly("2*y2 + y3", VarContext.y(3))


@pytest.mark.parametrize("seed", range(8))
def test_relation_dims_monotone_in_bound(seed):
    rng = random.Random(seed)
    X = VarContext.x(2)
    H = PolyMap([random_poly(rng, X, 2, 0.5) for _ in range(3)], ctx=X)
    basis = find_relations(H, 3)
    if not basis.homogeneous:
        vals = [basis.dims[d] for d in sorted(basis.dims)]
        assert vals == sorted(vals)
    for low in (1, 2):
        small = find_relations(H, low)
        assert all(r.holds_on(H) for r in small.generators)
        assert all(small.dims[d] == basis.dims[d] for d in small.dims)


@pytest.mark.parametrize("seed", range(6))
def test_agrees_with_naive_oracle(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(1, 3)
    X = VarContext.x(n)
    H = PolyMap([random_poly(rng, X, 2, 0.5) for _ in range(n)], ctx=X)
    basis = find_relations(H, 2)
    dims, gens = naive_relations(H, 2, basis.homogeneous)
    assert basis.dims == dims
    assert same_generators(basis, gens)
