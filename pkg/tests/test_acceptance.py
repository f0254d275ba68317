"""Acceptance criteria, each run at its stated tolerance and time limit.

Every criterion prints one PASS/FAIL line with its runtime. Run directly with
``python tests/test_acceptance.py`` for just the summary lines.
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import brute_reduced_homology, dense_invariant_factors  # noqa: E402
from stablab.complexes import (  # noqa: E402
    SimplicialComplex,
    boundary_of_simplex,
    full_simplex,
    join,
    labeled,
    ordered,
    star,
)
from stablab.homology import (  # noqa: E402
    FgAbelianGroup,
    SparseIntMatrix,
    Z,
    connectivity,
    invariant_factors,
    reduced_homology,
)
from stablab.models import (  # noqa: E402
    PuncturedDisk,
    act_word,
    base_tether,
    chain_truncation,
    doubled_tether_rule,
    polygon_arc_complex,
    polygon_diagonals,
    polygon_surgery_flow,
    quotient_simplex_mod_order,
    surger_tether,
    surgery_flow,
    tether_complex,
    tether_intersection,
    wedge_join_model,
)
from stablab.specseq import StabilityHypotheses, braid_pattern, stability_ranges  # noqa: E402
from stablab.toolbox import check_bad_rule, check_flow, claim, good_link, is_wCM  # noqa: E402


def _line(num: int, name: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> str:
    status = "PASS" if ok and elapsed < limit else "FAIL"
    return f"[{status}] criterion {num:>2} {name}: {elapsed:.2f}s (limit {limit:g}s){' ' + detail if detail else ''}"


def _run(num, name, limit, fn, capsys=None):
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    line = _line(num, name, ok, elapsed, limit, detail)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok, elapsed


# ---------------------------------------------------------------- criteria


def c1_quotient_simplex():
    for n in range(1, 9):
        H = reduced_homology(quotient_simplex_mod_order(n))
        if H.groups != ({n - 1: Z} if n % 2 == 0 else {}):
            return False, f"n={n}: {H.to_json()}"
    return True, "n = 1..8"


def c2_labeled_simplex():
    # (Delta^p)^S is a join of p+1 copies of S: a wedge of p-spheres, exactly (p-1)-connected
    for p in range(0, 4):
        for s in (2, 3):
            X = labeled(full_simplex(p), list(range(s)))
            H = reduced_homology(X)
            if H.groups != {p: FgAbelianGroup((s - 1) ** (p + 1))}:
                return False, f"p={p} |S|={s}: {H.to_json()}"
            c = connectivity(X, pi1=False)
            if c.homological_connectivity != p - 1 or c.acyclic:
                return False, f"p={p} |S|={s}: not exactly {p - 1}-connected"
    return True, "p <= 3, |S| in {2, 3}"


def _random_complex(rng, nv, nsimp, maxdim):
    return SimplicialComplex(rng.sample(range(nv), rng.randint(1, min(nv, maxdim + 1))) for _ in range(nsimp))


def c3_join_additivity():
    rng = random.Random(2024)
    pairs = 0
    while pairs < 50:
        X = _random_complex(rng, rng.randint(2, 7), rng.randint(2, 7), 2)
        Y = _random_complex(rng, rng.randint(2, 6), rng.randint(2, 6), 2)
        cx, cy = connectivity(X, pi1=False), connectivity(Y, pi1=False)
        if cx.acyclic or cy.acyclic:
            continue
        # the lowest groups need a free summand so the tensor product cannot vanish
        if reduced_homology(X)[cx.homological_connectivity + 1].rank == 0:
            continue
        if reduced_homology(Y)[cy.homological_connectivity + 1].rank == 0:
            continue
        pairs += 1
        a, b = cx.homological_connectivity, cy.homological_connectivity
        cj = connectivity(join(X, Y), pi1=False)
        if cj.homological_connectivity != a + b + 2:
            return False, f"pair {pairs}: a={a} b={b} join={cj.homological_connectivity}"
    return True, "50 pairs"


def _wcm_corpus():
    rng = random.Random(31)
    corpus = []
    for k in range(1, 4):
        corpus.append((boundary_of_simplex(k + 1), k))  # S^k
        corpus.append((full_simplex(k), k))
    for a in range(1, 3):
        for b in range(1, 3):
            if a + b <= 3:
                corpus.append((join(boundary_of_simplex(a + 1), boundary_of_simplex(b)), a + b))
    corpus.append((polygon_arc_complex(5), 1))
    corpus.append((polygon_arc_complex(6), 2))
    tries = 0
    while len(corpus) < 30 and tries < 5000:
        tries += 1
        X = _random_complex(rng, rng.randint(3, 6), rng.randint(2, 6), 2)
        for n in (3, 2):
            if is_wCM(X, n):
                corpus.append((X, n))
                break
    return [(X, n) for X, n in corpus if is_wCM(X, n)]


def c4_ordered_complex():
    corpus = _wcm_corpus()
    if len(corpus) < 20:
        return False, f"only {len(corpus)} certified complexes"
    for X, n in corpus:
        c = connectivity(ordered(X), pi1=False)
        if not c.at_least(n - 1):
            return False, f"{X!r} level {n}: conn {c.homological_connectivity}"
    edge = reduced_homology(ordered(full_simplex(1)))
    if edge.groups != {1: Z}:
        return False, "ordered edge is not a circle"
    return True, f"{len(corpus)} complexes, edge sharp"


def c5_flow_lemma():
    for n, B, L in [(2, 2, 6), (2, 4, 8), (3, 2, 6), (3, 3, 6)]:
        T = tether_complex(PuncturedDisk(n), B, words=L)
        t = base_tether(1)
        X = T.complex
        Y = star(X, [T.vertex(t)])
        flow, c = surgery_flow(T, t)
        r = check_flow(X, Y, flow, c)
        if not r.passed or not reduced_homology(X).is_trivial() or not reduced_homology(Y).is_trivial():
            return False, f"T_{n},1 B={B} L={L}: {[h.name for h in r.failing()]}"
    X = polygon_arc_complex(5)
    flow, c, a = polygon_surgery_flow(5)
    r = check_flow(X, star(X, [a]), flow, c)
    h = r.hypothesis("(i) sigma * delta(v_sigma) is a simplex of X")
    if h.passed or h.witness is None:
        return False, "pentagon flow did not fail (i)"
    return True, f"pentagon witness diagonal {polygon_diagonals(5)[h.witness['vertex']]}"


def c6_surgery_monotone():
    rng = random.Random(500)
    trials = 0
    while trials < 500:
        n = rng.randint(2, 4)
        D = PuncturedDisk(n)
        gens = [g for g in range(1, n)] + [-g for g in range(1, n)]
        word = lambda: [rng.choice(gens) for _ in range(rng.randint(0, 8))]  # noqa: E731
        t = act_word(word(), base_tether(rng.randint(1, n)), D)
        s = act_word(word(), base_tether(rng.randint(1, n)), D)
        k0 = tether_intersection(t, s, D)
        if k0 == 0:
            continue
        trials += 1
        k, steps = k0, 0
        while k > 0:
            s = surger_tether(t, s, D)
            new = tether_intersection(t, s, D)
            if new >= k:
                return False, f"trial {trials}: {k} -> {new}"
            k, steps = new, steps + 1
        if steps > k0:
            return False, f"trial {trials}: {steps} steps from {k0}"
    return True, "500 intersecting pairs"


def c7_bad_simplices():
    audited = 0
    for n, B, L in [(1, 2, 4), (2, 2, 6), (2, 4, 8), (3, 2, 6), (3, 3, 6)]:
        D = PuncturedDisk(n)
        T = tether_complex(D, B, words=L)
        T0 = tether_complex(D, B, coconnected=True, words=L)
        rule = doubled_tether_rule(T)
        if not check_bad_rule(T.complex, T0.complex, rule).hypotheses_hold:
            return False, f"n={n}: conditions (1)-(2) fail"
        for s in T.complex.faces():
            if rule(s):
                c = connectivity(good_link(T.complex, rule, s), pi1=False)
                audited += 1
                if not (c.acyclic and c.homological_connectivity >= 0):
                    return False, f"n={n}: G_sigma for {s} not acyclic"
    return True, f"{audited} bad simplices audited"


def c8_spectral_ranges():
    a = stability_ranges(StabilityHypotheses(cX="n-3"), 20)
    b = stability_ranges(StabilityHypotheses(cX="(n-3)/2"), 20)
    if (a.c, b.c) != (1, 2) or not (a.ledger and b.ledger):
        return False, f"c = {a.c}, {b.c}"
    for k in range(0, 4):
        for m in range(3, 6):
            if stability_ranges(StabilityHypotheses(cX=f"(n-{k})/{m}"), 20).feasible:
                return False, f"(n-{k})/{m} reported feasible"
    return True, "c = 1 and c = 2; slopes < 1/2 infeasible"


def c9_braid_pattern():
    audit = braid_pattern(7, 9)
    for m in (1, 3, 5, 7):
        if not audit.iso_all_degrees(m):
            return False, f"odd stage {m} not forced"
    for m in range(1, 7):
        if not audit.vanishing_above(m):
            return False, f"vanishing fails at {m}"
    return True, "odd n <= 7 iso, H_i(B_n) = 0 for i >= n, n <= 6"


def c10_chain_models():
    for a in range(1, 7):
        for b in range(1, 7):
            M = chain_truncation(2, 1, (a, b))
            c = connectivity(M.complex, pi1=False)
            H = reduced_homology(M.complex)
            brute = brute_reduced_homology(M.complex.maximal)
            if not c.at_least(0) or H.rank(1) != (a - 1) * (b - 1):
                return False, f"sizes {a},{b}"
            if {k: (g.rank, g.torsion) for k, g in H.groups.items()} != brute:
                return False, f"sizes {a},{b}: brute force disagrees"
    ch = claim("chains")
    if ch.floor(g=2) != -1 or chain_truncation(2, 1).complex.is_empty():
        return False, "genus 2 bound"
    return True, "part sizes <= 6; genus-2 bound witnessed as nonempty"


def c11_smith_form():
    rng = random.Random(11)
    for i in range(200):
        r, c = rng.randint(1, 40), rng.randint(1, 40)
        density = rng.choice([0.1, 0.3, 1.0])
        A = [[rng.randint(-9, 9) if rng.random() < density else 0 for _ in range(c)] for _ in range(r)]
        f = invariant_factors(SparseIntMatrix.from_dense(A))
        if f != dense_invariant_factors(A):
            return False, f"matrix {i}"
        if any(b % a for a, b in zip(f, f[1:])):
            return False, f"matrix {i}: not a divisibility chain"
    return True, "200 matrices"


def c12_wedge_models():
    for g in range(1, 5):
        for k in range(1, 5):
            H = reduced_homology(wedge_join_model(g, k))
            if H.groups != ({g - 1: FgAbelianGroup((k - 1) ** g)} if k > 1 else {}):
                return False, f"g={g} k={k}: {H.to_json()}"
    return True, "g, k <= 4"


CRITERIA = [
    (1, "quotient-complex homology", 1, c1_quotient_simplex),
    (2, "labeled-complex sharpness", 5, c2_labeled_simplex),
    (3, "join additivity", 30, c3_join_additivity),
    (4, "ordered-complex theorem", 60, c4_ordered_complex),
    (5, "flow lemma positive and negative", 60, c5_flow_lemma),
    (6, "surgery monotonicity", 120, c6_surgery_monotone),
    (7, "bad-simplex machinery", 120, c7_bad_simplices),
    (8, "spectral ranges", 1, c8_spectral_ranges),
    (9, "braid pattern", 5, c9_braid_pattern),
    (10, "chain models", 30, c10_chain_models),
    (11, "exact linear algebra", 60, c11_smith_form),
    (12, "wedge models", 30, c12_wedge_models),
]


@pytest.mark.parametrize("num,name,limit,fn", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, name, limit, fn, capsys):
    ok, elapsed = _run(num, name, limit, fn, capsys)
    assert ok
    assert elapsed < limit


if __name__ == "__main__":
    results = [_run(*c) for c in CRITERIA]
    sys.exit(0 if all(ok for ok, _ in results) else 1)
