import json

import pytest
from hypothesis import given

from stablab.complexes import (
    Poset,
    PosetMap,
    SimplicialComplex,
    SimplicialMap,
    boundary_of_simplex,
    face_poset,
    full_simplex,
    join,
)
from stablab.errors import MalformedInputError, NotFoundError, PreconditionError
from stablab.homology import connectivity
from stablab.toolbox import (
    BadSimplexRule,
    ComplexityFunction,
    FlowRule,
    check_bad_rule,
    check_flow,
    claim,
    fiber_connectivity_check,
    fibers,
    good_link,
    is_wCM,
    ordered_connectivity_test,
    quillen_audit,
    simplexwise_injective_rel,
    verify_link_argument,
)

from strategies import complexes

TRI = full_simplex(2)
EDGE12 = TRI.induced([1, 2])
HAS0 = BadSimplexRule("contains 0", lambda s: 0 in s)


def test_bad_rule_passes_on_vertex_rule():
    r = check_bad_rule(TRI, EDGE12, HAS0)
    assert r.hypotheses_hold
    assert r.details["bad_simplices"] == 4


def test_bad_rule_condition_one_fails():
    never = BadSimplexRule("never", lambda s: False)
    r = check_bad_rule(TRI, EDGE12, never)
    assert r.hypothesis("(1) a simplex with no bad faces is in Y").witness == (0,)


def test_bad_rule_condition_two_fails():
    only_vertices = BadSimplexRule("vertices 0 or 1", lambda s: s in ((0,), (1,)))
    r = check_bad_rule(full_simplex(1), SimplicialComplex(), only_vertices)
    w = r.hypothesis("(2) the join of two bad faces of a simplex is bad").witness
    assert w == {"faces": [(0,), (1,)], "join": (0, 1)}


def test_bad_rule_rejects_non_subcomplex():
    with pytest.raises(MalformedInputError):
        check_bad_rule(EDGE12, TRI, HAS0)


def test_good_link_errors():
    with pytest.raises(PreconditionError):
        good_link(TRI, HAS0, [1])
    with pytest.raises(NotFoundError):
        good_link(EDGE12, HAS0, [0])
    assert good_link(TRI, HAS0, [0]).is_empty()


def test_link_argument_reports_empty_good_link():
    r = verify_link_argument(TRI, EDGE12, HAS0, 0, mode="prop")
    h = r.hypothesis("G_sigma connectivity for every bad sigma")
    assert not h.passed and h.witness["simplex"] == (0,)


def test_link_argument_vacuous_below_minus_one():
    r = verify_link_argument(TRI, EDGE12, HAS0, -1, mode="prop")
    assert r.passed
    assert r.conclusion_crosscheck["pass"]


def test_link_argument_unknown_mode():
    with pytest.raises(MalformedInputError):
        verify_link_argument(TRI, EDGE12, HAS0, 0, mode="c")


def _cone_flow():
    # X = cone on a triangle boundary with apex 3; flow everything onto the apex star
    X = join(boundary_of_simplex(2), full_simplex(0))
    Y = X.induced([3])
    return X, Y


def test_flow_on_a_cone_is_trivial():
    X, Y = _cone_flow()
    flow = FlowRule(delta=lambda v: (3,), pick=lambda s: s[0])
    r = check_flow(X, Y, flow, ComplexityFunction(lambda v: 0 if v == 3 else 1))
    assert r.passed


def test_flow_condition_one_witness():
    X = SimplicialComplex([[0, 1], [1, 2]])
    Y = X.induced([2])
    flow = FlowRule(delta=lambda v: (2,), pick=lambda s: min(s))
    r = check_flow(X, Y, flow, ComplexityFunction(lambda v: 2 - v))
    assert not r.passed
    w = r.hypothesis("(i) sigma * delta(v_sigma) is a simplex of X").witness
    assert w["vertex"] == 0


def test_flow_condition_two_witness():
    X, Y = _cone_flow()
    flow = FlowRule(delta=lambda v: (3,), pick=lambda s: s[0])
    r = check_flow(X, Y, flow, ComplexityFunction(lambda v: 1))
    assert r.failing()[0].name == "(ii) c(delta v) < c(v)"


def test_flow_pick_must_be_in_simplex():
    X, Y = _cone_flow()
    with pytest.raises(MalformedInputError):
        check_flow(X, Y, FlowRule(lambda v: (3,), lambda s: 99), ComplexityFunction(lambda v: 1))


def test_fibers_of_collapse():
    f = SimplicialMap(full_simplex(1), full_simplex(0), {0: 0, 1: 0})
    assert fibers(f, (0,), "simplicial-preimage") == full_simplex(1)
    assert fibers(f, (0,), "barycentric").f_vector() == [3, 2]
    with pytest.raises(NotFoundError):
        fibers(f, (5,), "barycentric")
    assert fiber_connectivity_check(f, 3).passed


def test_fiber_check_detects_disconnected_fiber():
    X = SimplicialComplex([[0], [1]])
    f = SimplicialMap(X, full_simplex(0), {0: 0, 1: 0})
    r = fiber_connectivity_check(f, 0)
    assert not r.passed


def test_quillen_identity():
    P = face_poset(boundary_of_simplex(2))
    r = quillen_audit(PosetMap(P, P, {p: p for p in P.elements}))
    assert r.passed
    assert quillen_audit(PosetMap(P, P, {p: p for p in P.elements}), "upper").passed


def test_quillen_fails_on_disconnected_fiber():
    P = Poset.from_relation(["a", "b"], [])
    Q = Poset.from_relation(["*"], [])
    r = quillen_audit(PosetMap(P, Q, {"a": "*", "b": "*"}))
    assert not r.hypotheses_hold


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_sphere_is_wcm(n):
    # the boundary of an n-simplex is an (n-1)-sphere
    assert is_wCM(boundary_of_simplex(n), n - 1)
    w = is_wCM(boundary_of_simplex(n), n)
    assert not w and w.binding["simplex"] is None


def test_ordered_edge_is_sharp():
    r = ordered_connectivity_test(full_simplex(1), 1)
    assert r.passed
    assert r.details["conn_X_ord"] == 0


def test_simplexwise_injective_full_and_not_full():
    Y = full_simplex(2)
    f = SimplicialMap(Y, full_simplex(1), {0: 0, 1: 0, 2: 1})
    full = simplexwise_injective_rel(f, Y.induced([0, 1]))
    assert full.holds and full.z_full and full.equivalent
    # Z has both vertices of the collapsed edge but not the edge
    thin = simplexwise_injective_rel(f, SimplicialComplex([[0], [1]]))
    assert not thin.holds and thin.link_condition and not thin.z_full
    assert json.loads(json.dumps(thin.to_json()))["witness"] == [0, 1]


def test_claim_registry():
    c = claim("chains")
    assert c.floor(g=2) == -1
    assert c.satisfied_by(connectivity(full_simplex(0)), g=2)
    with pytest.raises(NotFoundError):
        claim("nope")


@given(complexes(max_vertices=6, max_dim=2, max_simplices=6))
def test_report_json_is_plain(X):
    r = verify_link_argument(X, X.induced([v for v in X.vertices if v != 0]), HAS0, 0, mode="prop")
    json.dumps(r.to_json())


@given(complexes(max_vertices=6, max_dim=2, max_simplices=6))
def test_full_subcomplex_makes_conditions_agree(X):
    keep = [v for v in X.vertices if v % 2 == 0]
    f = SimplicialMap(X, full_simplex(0), {v: 0 for v in X.vertices})
    r = simplexwise_injective_rel(f, X.induced(keep))
    assert r.z_full and r.equivalent


@given(complexes(max_vertices=6, max_dim=2, max_simplices=6))
def test_wcm_level_zero_is_vacuous(X):
    assert is_wCM(X, 0)
