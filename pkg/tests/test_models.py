import json
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablab.complexes import link, star
from stablab.errors import MalformedInputError
from stablab.homology import Z, connectivity, reduced_homology
from stablab.models import (
    ChainVertex,
    PuncturedDisk,
    base_tether,
    chain_truncation,
    diagonals_cross,
    doubled_tether_rule,
    genus_one_chains,
    polygon_arc_complex,
    polygon_diagonals,
    polygon_surgery_flow,
    quotient_simplex_mod_order,
    surgery_flow,
    tether_complex,
    tether_orbit,
    wedge_join_model,
)
from stablab.toolbox import check_bad_rule, check_flow

from oracles import brute_reduced_homology


# ---------------------------------------------------------------- quotient simplex


@pytest.mark.parametrize("n", range(1, 9))
def test_quotient_simplex(n):
    Q = quotient_simplex_mod_order(n)
    assert all(Q.num_cells(k) == 1 for k in range(n))
    assert reduced_homology(Q).groups == ({n - 1: Z} if n % 2 == 0 else {})


def test_quotient_simplex_rejects_zero():
    with pytest.raises(MalformedInputError):
        quotient_simplex_mod_order(0)


# ---------------------------------------------------------------- polygons


def test_polygon_diagonal_counts():
    for m in range(4, 10):
        assert len(polygon_diagonals(m)) == m * (m - 3) // 2
    assert diagonals_cross((0, 2), (1, 3))
    assert not diagonals_cross((0, 2), (2, 4))


def test_polygon_small_cases():
    assert polygon_arc_complex(4).f_vector() == [2]
    assert reduced_homology(polygon_arc_complex(5)).betti() == {1: 1}
    P6 = polygon_arc_complex(6)
    assert reduced_homology(P6).betti() == {2: 1}
    assert brute_reduced_homology(P6.maximal) == {2: (1, ())}


@pytest.mark.parametrize("m", range(5, 9))
def test_polygon_is_a_sphere(m):
    assert reduced_homology(polygon_arc_complex(m)).groups == {m - 4: Z}


def test_pentagon_flow_fails_condition_one():
    X = polygon_arc_complex(5)
    flow, c, a = polygon_surgery_flow(5)
    r = check_flow(X, star(X, [a]), flow, c)
    assert not r.passed
    w = r.hypothesis("(i) sigma * delta(v_sigma) is a simplex of X").witness
    assert polygon_diagonals(5)[w["vertex"]] == (1, 3)
    assert w["delta"] is None


# ---------------------------------------------------------------- wedges and chains


def test_wedge_examples():
    assert reduced_homology(wedge_join_model(2, 3)).betti() == {1: 4}
    assert reduced_homology(wedge_join_model(1, 4)).betti() == {0: 3}
    octa = wedge_join_model(3, 2)
    assert octa.f_vector() == [6, 12, 8]


@given(st.integers(1, 3), st.integers(1, 3))
def test_wedge_model_homology(g, k):
    H = reduced_homology(wedge_join_model(g, k))
    assert H.betti() == ({g - 1: (k - 1) ** g} if k > 1 else {})


def test_chain_vertex_validation():
    with pytest.raises(MalformedInputError):
        ChainVertex((1, 0), (1, 0), 1)
    with pytest.raises(MalformedInputError):
        ChainVertex((-1, 0), (0, 1), 1)
    with pytest.raises(MalformedInputError):
        ChainVertex((1, 0), (0, 1), 0)


def test_genus_one_truncation():
    base = genus_one_chains(1)
    assert ChainVertex((1, 0), (0, 1), 1) in base
    assert len(base) == 20
    M = chain_truncation(1, 1)
    assert M.complex.dimension == 0 and len(M.complex.vertices) == 20


@given(st.integers(1, 6), st.integers(1, 6))
def test_genus_two_bipartite(a, b):
    M = chain_truncation(2, 1, (a, b))
    assert M.part_sizes == (a, b)
    c = connectivity(M.complex, pi1=False)
    assert c.at_least(0)
    assert reduced_homology(M.complex).rank(1) == (a - 1) * (b - 1)


# ---------------------------------------------------------------- tether complexes


def test_single_puncture_is_a_point():
    T = tether_complex(PuncturedDisk(1), 5, words=5)
    assert T.complex.f_vector() == [1]


def test_orbit_sizes():
    assert len(tether_orbit(PuncturedDisk(2), 0)) == 2
    T = tether_complex(PuncturedDisk(3), 2, words=4)
    assert len(T.tethers) == 37
    assert len(tether_complex(PuncturedDisk(3), 2, words=8).tethers) == 37


@pytest.mark.parametrize("n", [2, 3])
def test_coconnected_dimension(n):
    T0 = tether_complex(PuncturedDisk(n), 0, coconnected=True, words=0)
    assert T0.complex.dimension == n - 1
    assert T0.complex.maximal == (tuple(range(n)),)


def test_coconnected_truncations_acyclic():
    # (B, L) -> connectivity stays at the top value for n = 3
    D = PuncturedDisk(3)
    for B, L in [(0, 0), (1, 2), (1, 4), (2, 4), (2, 6)]:
        c = connectivity(tether_complex(D, B, coconnected=True, words=L).complex, pi1=False)
        assert c.acyclic


@pytest.mark.parametrize("n,B,L", [(2, 2, 6), (3, 2, 4)])
def test_surgery_flow_on_truncation(n, B, L):
    T = tether_complex(PuncturedDisk(n), B, words=L)
    flow, c = surgery_flow(T, base_tether(1))
    X = T.complex
    r = check_flow(X, star(X, [T.vertex(base_tether(1))]), flow, c)
    assert r.passed


def test_doubled_rule_conditions():
    D = PuncturedDisk(3)
    T = tether_complex(D, 2, words=4)
    T0 = tether_complex(D, 2, coconnected=True, words=4)
    assert T0.tethers == T.tethers
    assert check_bad_rule(T.complex, T0.complex, doubled_tether_rule(T)).hypotheses_hold


def test_tether_link_of_base_vertex():
    T = tether_complex(PuncturedDisk(2), 2, words=6)
    L = link(T.complex, [T.vertex(base_tether(1))])
    assert not L.is_empty()


def _gen_json(seed: str) -> str:
    env = dict(os.environ, PYTHONHASHSEED=seed)
    code = ("from stablab.models import *; import json;"
            "T = tether_complex(PuncturedDisk(3), 2, coconnected=True, words=4);"
            "print(json.dumps([T.complex.to_json(), [t.to_json() for t in T.tethers]]))")
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout


def test_truncation_independent_of_hash_seed():
    assert _gen_json("1") == _gen_json("12345")
    json.loads(_gen_json("7"))
