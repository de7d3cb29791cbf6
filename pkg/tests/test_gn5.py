from __future__ import annotations

import pytest

from qtrans.errors import BoundExhausted, PreconditionError, WitnessError
from qtrans.gn5 import (
    apex_certificate,
    degree_report,
    fall_b_form_verify,
    gn_form_verify,
    gradient_linear_dependence,
    hessian_to_qt,
    is_gn_plane,
    linear_closure_certificate,
)
from qtrans.linalg import det, hessian, jacobian
from qtrans.parse import parse_poly
from qtrans.poly import Poly, PolyMap, VarContext
from qtrans.qt import is_invariant, is_quasi_translation
from qtrans.relations import find_relations

from conftest import (
    CUBIC,
    X5,
    P,
    generated_singular_hessians,
    map_a1,
    map_a2,
    map_b,
    pipeline_map,
    poly_b,
)

Y2 = VarContext.y(2)
Y4 = VarContext.y(4)
PERM = [[0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1], [1, 0, 0, 0, 0], [0, 1, 0, 0, 0]]


def test_hessian_equals_jacobian_of_gradient():
    for h in (P(CUBIC), poly_b(), P("x1^3*x2 + x5^4")):
        assert hessian(h) == jacobian(h.gradient())
        assert hessian(h).is_symmetric()


def test_pipeline_on_cubic():
    res = hessian_to_qt(P(CUBIC), dmax=2)
    assert str(res.R) == "y1*y3 - y2^2"
    assert res.R.degree == 2
    assert res.H == pipeline_map()
    assert all(res.checks.values())


def test_pipeline_small_cases():
    X2 = VarContext.x(2)
    assert list(hessian_to_qt(parse_poly("x1^2", X2)).H) == [0, 1]
    X3 = VarContext.x(3)
    assert list(hessian_to_qt(parse_poly("x1*x2", X3)).H) == [0, 0, 1]


def test_pipeline_rejects_nondegenerate():
    with pytest.raises(PreconditionError):
        hessian_to_qt(P("x1^2 + x2^2 + x3^2 + x4^2 + x5^2"))


def test_pipeline_bound_exhausted():
    # the partials of the cubic only satisfy a quadratic relation
    with pytest.raises(BoundExhausted):
        hessian_to_qt(P(CUBIC), dmax=1)


@pytest.mark.parametrize("h", generated_singular_hessians(12, seed=5), ids=str)
def test_pipeline_soundness_and_minimality(h):
    res = hessian_to_qt(h, dmax=3)
    assert is_quasi_translation(res.H)
    for g in h.gradient():
        assert is_invariant(g, res.H)
    lower = find_relations(h.gradient(), res.R.degree - 1) if res.R.degree > 1 else None
    assert lower is None or lower.minimal_degree is None


@pytest.mark.parametrize("h", generated_singular_hessians(24), ids=str)
def test_gradient_dependence_on_generated(h):
    assert not det(hessian(h))
    rels = gradient_linear_dependence(h)
    assert rels and all(r.certified and r.degree == 1 for r in rels)


def test_gradient_dependence_examples():
    X3 = VarContext.x(3)
    assert [str(r) for r in gradient_linear_dependence(parse_poly("x1^2*x2", X3))] == ["y3"]
    X2 = VarContext.x(2)
    assert [str(r) for r in gradient_linear_dependence(parse_poly("(x1 + x2)^3", X2))] == ["y1 - y2"]
    with pytest.raises(PreconditionError):
        gradient_linear_dependence(parse_poly("x1*x2 + x3^2", X3))


def test_gradient_dependence_preconditions():
    with pytest.raises(PreconditionError):
        gradient_linear_dependence(P(CUBIC))


# -- geometry ---------------------------------------------------------------------

E = [[int(i == j) for j in range(5)] for i in range(5)]


def test_gn_planes_of_pipeline_map():
    H = pipeline_map()
    assert is_gn_plane(H, E[0], E[1])
    assert not is_gn_plane(H, E[3], E[4])
    with pytest.raises(PreconditionError):
        is_gn_plane(H, E[0], [2, 0, 0, 0, 0])


@pytest.mark.parametrize("k", range(5))
def test_no_coordinate_apex_for_pipeline_map(k):
    cert = apex_certificate(pipeline_map(), E[k], 2)
    assert not cert.holds and cert.degree_bound == 2


def test_apex_of_single_square():
    X3 = VarContext.x(3)
    H = PolyMap([parse_poly("x2^2", X3), Poly.zero(X3), Poly.zero(X3)], ctx=X3)
    assert apex_certificate(H, [1, 0, 0], 2).holds


@pytest.mark.parametrize("k", range(5))
def test_apex_monotone_in_bound(k):
    H = map_a1()
    verdicts = [apex_certificate(H, E[k], d).holds for d in (1, 2, 3)]
    for lo, hi in zip(verdicts, verdicts[1:]):
        assert lo or not hi


def test_linear_closure():
    assert linear_closure_certificate(map_a1(), 2).holds
    cert = linear_closure_certificate(map_a2(), 2)
    assert not cert.holds


# -- normal forms ---------------------------------------------------------------

def _gn_witness():
    X3 = VarContext.y(3)
    return parse_poly("y3", X3), P("x1^2"), P("x1*x2"), P("x2^2")


def test_gn_form_accepts_witness():
    assert gn_form_verify(P(CUBIC), PERM, *_gn_witness())


def test_gn_form_rejects_perturbations():
    f, a1, a2, a3 = _gn_witness()
    h = P(CUBIC)
    for k in range(3):
        coeffs = [a1, a2, a3]
        coeffs[k] = coeffs[k] + coeffs[k]
        assert not gn_form_verify(h, PERM, f, *coeffs)
    assert not gn_form_verify(h, PERM, f + f, a1, a2, a3)


def test_gn_form_witness_errors():
    f, a1, a2, a3 = _gn_witness()
    with pytest.raises(WitnessError):
        gn_form_verify(P(CUBIC), [[1] * 5] * 5, f, a1, a2, a3)
    with pytest.raises(WitnessError):
        gn_form_verify(P(CUBIC), PERM, f, P("x3"), a2, a3)


def _fall_b_witness():
    hvec = [parse_poly(t, Y2) for t in ("y1^5", "y2*y1^3", "y2^2*y1")] + [Poly.zero(Y2)]
    return P("1"), hvec, P("x5"), poly_b()


def test_fall_b_accepts_case_b():
    g, hvec, p, q = _fall_b_witness()
    assert fall_b_form_verify(map_b(), 4, g, hvec, p, q)


def test_fall_b_rejects_perturbed_q():
    g, hvec, p, q = _fall_b_witness()
    assert not fall_b_form_verify(map_b(), 4, g, hvec, p, q + P("x1*x2"))


def test_fall_b_witness_errors():
    g, hvec, p, q = _fall_b_witness()
    with pytest.raises(WitnessError):
        fall_b_form_verify(map_b(), 4, Poly.zero(X5), hvec, p, q)
    with pytest.raises(WitnessError):
        fall_b_form_verify(map_b(), 4, g, hvec, p, q + P("x1"))
    with pytest.raises(WitnessError):
        fall_b_form_verify(map_b(), 4, g, hvec, p, p)


def test_degree_report_case_b():
    rep = degree_report(map_b()).as_dict()
    assert rep["degree"] == 5 and rep["rank"] == 3 and rep["linear_invariants"] == 1
    assert rep["component_degrees"][-1] == "-inf"
