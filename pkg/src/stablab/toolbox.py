"""Finite checkers for the connectivity arguments: bad simplices and links,
fibers of maps, flows toward a subcomplex, weak Cohen-Macaulayness and the
relative injectivity condition.

Every "connected" hypothesis is certified homologically. Fundamental group
evidence is attached to reports but never decides pass or fail.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional, Sequence, Union

from .complexes import (
    Poset,
    PosetMap,
    SimplicialComplex,
    SimplicialMap,
    Simplex,
    link,
    order_complex,
    ordered,
)
from .errors import MalformedInputError, NotFoundError, PreconditionError
from .homology import ConnectivityCertificate, connectivity, reduced_homology, relative_homology


# ---------------------------------------------------------------- reports


@dataclass
class Hypothesis:
    name: str
    passed: bool
    witness: Any = None

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "witness": _jsonable(self.witness)}


@dataclass
class Report:
    statement: str
    hypotheses: list[Hypothesis] = field(default_factory=list)
    conclusion_crosscheck: Optional[dict] = None
    binding_constraint: Any = None
    details: dict = field(default_factory=dict)

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.passed for h in self.hypotheses)

    @property
    def passed(self) -> bool:
        ok = self.conclusion_crosscheck is None or self.conclusion_crosscheck.get("pass", True)
        return self.hypotheses_hold and ok

    def failing(self) -> list[Hypothesis]:
        return [h for h in self.hypotheses if not h.passed]

    def hypothesis(self, name: str) -> Hypothesis:
        return next(h for h in self.hypotheses if h.name == name)

    def to_json(self) -> dict:
        out = {
            "statement": self.statement,
            "hypotheses": [h.to_json() for h in self.hypotheses],
            "conclusion_crosscheck": _jsonable(self.conclusion_crosscheck),
            "binding_constraint": _jsonable(self.binding_constraint),
            "pass": self.passed,
        }
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


RuleAudit = Report
FlowAudit = Report


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, Fraction):
        return str(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _cert_json(c: ConnectivityCertificate) -> dict:
    return c.to_json()


# ---------------------------------------------------------------- rule types


@dataclass(frozen=True)
class BadSimplexRule:
    name: str
    predicate: Callable[[Simplex], bool]

    def __call__(self, s: Simplex) -> bool:
        return bool(self.predicate(tuple(s)))


@dataclass(frozen=True)
class ComplexityFunction:
    vertex_cost: Callable[[int], int]

    def __call__(self, s: Iterable[int]) -> int:
        return sum(self.vertex_cost(v) for v in s)


@dataclass(frozen=True)
class FlowRule:
    delta: Callable[[int], Optional[Sequence[int]]]
    pick: Callable[[Simplex], int]
    name: str = "flow"


# ---------------------------------------------------------------- bad simplices


def _faces_of(s: Simplex) -> Iterable[Simplex]:
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


def _bad_table(X: SimplicialComplex, rule: BadSimplexRule) -> dict[Simplex, bool]:
    table = {s: rule(s) for s in X.faces()}
    for s in list(table)[:: max(1, len(table) // 50)]:
        if rule(s) != table[s]:
            raise MalformedInputError(f"rule {rule.name!r} is not deterministic on {list(s)}")
    return table


def check_bad_rule(X: SimplicialComplex, Y: SimplicialComplex, rule: BadSimplexRule) -> RuleAudit:
    if not Y.is_subcomplex_of(X):
        raise MalformedInputError("Y is not a subcomplex of X")
    bad = _bad_table(X, rule)
    report = Report(f"bad-simplex rule '{rule.name}' satisfies conditions (1) and (2)")

    in_y = next((s for s in X.faces() if bad[s] and s in Y), None)
    report.hypotheses.append(Hypothesis("bad simplices lie outside Y", in_y is None, in_y))

    has_bad: dict[Simplex, bool] = {}
    for s in X.faces():  # sorted by dimension, so faces come first
        has_bad[s] = bad[s] or (len(s) > 1 and any(has_bad[s[:i] + s[i + 1:]] for i in range(len(s))))
    w1 = next((s for s in X.faces() if not has_bad[s] and s not in Y), None)
    report.hypotheses.append(Hypothesis("(1) a simplex with no bad faces is in Y", w1 is None, w1))

    w2 = None
    seen: set[tuple[Simplex, Simplex]] = set()
    for m in X.maximal:
        bads = [f for f in _faces_of(m) if bad[f]]
        for a, b in itertools.combinations(bads, 2):
            sa, sb = set(a), set(b)
            if sa <= sb or sb <= sa or (a, b) in seen:
                continue
            seen.add((a, b))
            u = tuple(sorted(sa | sb))
            if not bad[u]:
                w2 = {"faces": [a, b], "join": u}
                break
        if w2:
            break
    report.hypotheses.append(Hypothesis("(2) the join of two bad faces of a simplex is bad", w2 is None, w2))
    report.details["bad_simplices"] = sum(bad.values())
    return report


def good_link(X: SimplicialComplex, rule: BadSimplexRule, sigma: Iterable[int]) -> SimplicialComplex:
    """G_sigma: simplices tau of lk(sigma) whose join with sigma has no bad face meeting tau."""
    s = tuple(sorted(sigma))
    if s not in X:
        raise NotFoundError(f"{list(s)} is not a simplex of X")
    if not rule(s):
        raise PreconditionError(f"{list(s)} is not bad under {rule.name!r}")
    L = link(X, s)
    ss = set(s)

    def good(tau: Simplex) -> bool:
        full = tuple(sorted(ss | set(tau)))
        return not any(rule(f) for f in _faces_of(full) if not set(f) <= ss)

    return L.subcomplex(good)


_MODES = {
    "prop": ("link argument: the pair (X, Y) is n-connected", 1),
    "a": ("link argument, subcomplex form: X n-connected implies Y n-connected", 0),
    "b": ("link argument, extension form: Y n-connected implies X n-connected", 1),
}


def verify_link_argument(X: SimplicialComplex, Y: SimplicialComplex, rule: BadSimplexRule, n: int,
                         mode: str = "prop") -> Report:
    """Audit the link-argument hypotheses and cross-check the conclusion homologically.

    ``mode`` is "prop" (pair connectivity), "a" (X to Y) or "b" (Y to X).
    Each bad sigma needs G_sigma to be (n - dim sigma - offset)-connected
    where offset is 1 for "prop" and "b" and 0 for "a".
    """
    if mode not in _MODES:
        raise MalformedInputError(f"unknown mode {mode!r}")
    statement, offset = _MODES[mode]
    audit = check_bad_rule(X, Y, rule)
    report = Report(statement.replace("n-", f"{n}-"), list(audit.hypotheses))
    report.details["rule"] = rule.name
    if not audit.hypotheses_hold:
        return report
    if mode == "a":
        cx = connectivity(X, pi1=False)
        report.hypotheses.append(Hypothesis(f"X is {n}-connected", cx.at_least(n), _cert_json(cx)))
    if mode == "b":
        cy = connectivity(Y, pi1=False)
        report.hypotheses.append(Hypothesis(f"Y is {n}-connected", cy.at_least(n), _cert_json(cy)))
    worst = None
    failure = None
    audited = 0
    for s in X.faces():
        if not rule(s):
            continue
        need = n - (len(s) - 1) - offset
        if need <= -2:
            continue
        G = good_link(X, rule, s)
        c = connectivity(G, pi1=False)
        audited += 1
        slack = math.inf if c.acyclic else c.homological_connectivity - need
        if worst is None or slack < worst[0]:
            worst = (slack, {"simplex": s, "required": need, "certificate": c.to_json()})
        if not c.at_least(need) and failure is None:
            failure = {"simplex": s, "required": need, "certificate": c.to_json()}
    report.hypotheses.append(Hypothesis("G_sigma connectivity for every bad sigma", failure is None, failure))
    report.binding_constraint = worst[1] if worst else None
    report.details["audited_bad_simplices"] = audited
    if report.hypotheses_hold:
        if mode == "prop":
            rel = relative_homology(X, Y)
            bad = [k for k in rel.groups if k <= n]
            report.conclusion_crosscheck = {"claim": f"H_i(X, Y) = 0 for i <= {n}", "pass": not bad,
                                            "relative_homology": rel.to_json()}
        else:
            target = Y if mode == "a" else X
            c = connectivity(target, pi1=False)
            report.conclusion_crosscheck = {"claim": f"{'Y' if mode == 'a' else 'X'} is {n}-connected",
                                            "pass": c.at_least(n), "certificate": c.to_json()}
    return report


# ---------------------------------------------------------------- fibers


def _simplex_arg(target: Any) -> Simplex:
    return tuple(sorted(target))


def fibers(f: Union[SimplicialMap, PosetMap], target: Any, kind: str) -> Union[Poset, SimplicialComplex]:
    """Fiber of a map over a simplex or poset element.

    For simplicial maps, "simplicial-preimage" gives the subcomplex mapping
    into the target simplex and "barycentric" gives the order complex of the
    simplices mapping onto it exactly (the fiber over its barycenter);
    "under"/"over" give the posets of simplices whose image lies below/above.
    For poset maps only "under"/"over" apply.
    """
    if isinstance(f, PosetMap):
        if target not in set(f.target.elements):
            raise NotFoundError(f"{target!r} is not in the target poset")
        if kind == "under":
            return f.source.restrict(p for p in f.source.elements if f.target.le(f(p), target))
        if kind == "over":
            return f.source.restrict(p for p in f.source.elements if f.target.le(target, f(p)))
        raise MalformedInputError(f"fiber kind {kind!r} needs a simplicial map")
    sigma = _simplex_arg(target)
    if sigma not in f.target:
        raise NotFoundError(f"{list(sigma)} is not a simplex of the target")
    ss = set(sigma)
    if kind == "simplicial-preimage":
        return f.source.subcomplex(lambda t: set(f.image(t)) <= ss)
    from .complexes import face_poset

    P = face_poset(f.source)
    if kind == "barycentric":
        return order_complex(P.restrict(t for t in P.elements if f.image(t) == sigma))
    if kind == "under":
        return P.restrict(t for t in P.elements if set(f.image(t)) <= ss)
    if kind == "over":
        return P.restrict(t for t in P.elements if ss <= set(f.image(t)))
    raise MalformedInputError(f"unknown fiber kind {kind!r}")


def _contractible(c: ConnectivityCertificate) -> bool:
    return c.homological_connectivity >= 0 and c.acyclic


def quillen_audit(phi: PosetMap, direction: str = "lower") -> Report:
    if direction not in ("lower", "upper"):
        raise MalformedInputError("direction must be 'lower' or 'upper'")
    kind = "under" if direction == "lower" else "over"
    report = Report(f"fiber lemma for posets: all {direction} fibers contractible implies a homotopy equivalence")
    failure = None
    strong = True
    for q in phi.target.elements:
        fib = order_complex(fibers(phi, q, kind))
        c = connectivity(fib)
        if not _contractible(c) and failure is None:
            failure = {"element": q, "certificate": c.to_json()}
        strong &= c.pi1_status == "trivial"
    report.hypotheses.append(Hypothesis(f"every {direction} fiber is contractible", failure is None, failure))
    report.details["pi1_strong"] = strong
    if failure is None:
        hp = reduced_homology(order_complex(phi.source))
        hq = reduced_homology(order_complex(phi.target))
        report.conclusion_crosscheck = {"claim": "reduced homology of source and target agree",
                                        "pass": hp == hq, "source": hp.to_json(), "target": hq.to_json()}
    return report


def fiber_connectivity_check(f: SimplicialMap, n: int) -> Report:
    report = Report(f"fiber connectivity: Y {n}-connected with (n-k)-connected fibers over k-simplices "
                    f"implies X {n}-connected")
    cy = connectivity(f.target, pi1=False)
    report.hypotheses.append(Hypothesis(f"Y is {n}-connected", cy.at_least(n), cy.to_json()))
    failure = None
    worst = None
    for s in f.target.faces():
        need = n - (len(s) - 1)
        if need <= -2:
            continue
        c = connectivity(fibers(f, s, "barycentric"), pi1=False)
        slack = math.inf if c.acyclic else c.homological_connectivity - need
        if worst is None or slack < worst[0]:
            worst = (slack, {"simplex": s, "required": need, "certificate": c.to_json()})
        if not c.at_least(need) and failure is None:
            failure = {"simplex": s, "required": need, "certificate": c.to_json()}
    report.hypotheses.append(Hypothesis("barycentric fibers are (n-k)-connected", failure is None, failure))
    report.binding_constraint = worst[1] if worst else None
    if report.hypotheses_hold:
        cx = connectivity(f.source, pi1=False)
        report.conclusion_crosscheck = {"claim": f"X is {n}-connected", "pass": cx.at_least(n),
                                        "certificate": cx.to_json()}
    return report


# ---------------------------------------------------------------- flows


def check_flow(X: SimplicialComplex, Y: SimplicialComplex, flow: FlowRule, c: ComplexityFunction) -> FlowAudit:
    if not Y.is_subcomplex_of(X):
        raise MalformedInputError("Y is not a subcomplex of X")
    report = Report("flow lemma: Y is a deformation retract of X")
    yverts = set(Y.vertices)
    outside = [v for v in X.vertices if v not in yverts]
    nonpos = next((v for v in outside if c.vertex_cost(v) <= 0), None)
    report.hypotheses.append(Hypothesis("complexity is positive off Y", nonpos is None, nonpos))

    picks: dict[Simplex, int] = {}
    deltas: dict[int, Optional[Simplex]] = {}
    w_out = w1 = w2 = w3 = None
    for s in X.faces():
        if s in Y:
            continue
        v = flow.pick(s)
        if v not in s:
            raise MalformedInputError(f"flow rule picked {v} outside {list(s)}")
        picks[s] = v
        if v in yverts:
            w_out = w_out or {"simplex": s, "vertex": v}
            continue
        if v not in deltas:
            d = flow.delta(v)
            deltas[v] = tuple(sorted(d)) if d else None
        d = deltas[v]
        # delta may share vertices with sigma; the join is then the union
        if d is None or v in d or tuple(sorted(set(s) | set(d))) not in X:
            w1 = w1 or {"simplex": s, "vertex": v, "delta": d}
        elif c(d) >= c.vertex_cost(v):
            w2 = w2 or {"vertex": v, "delta": d, "c(v)": c.vertex_cost(v), "c(delta)": c(d)}
    for s, v in picks.items():
        if w3:
            break
        for i in range(len(s)):
            t = s[:i] + s[i + 1:]
            if t and v in t and picks.get(t) != v:
                w3 = {"simplex": s, "face": t, "picked": v, "face_picked": picks.get(t)}
                break
    report.hypotheses += [
        Hypothesis("picked vertex lies outside Y", w_out is None, w_out),
        Hypothesis("(i) sigma * delta(v_sigma) is a simplex of X", w1 is None, w1),
        Hypothesis("(ii) c(delta v) < c(v)", w2 is None, w2),
        Hypothesis("(iii) faces containing v_sigma pick v_sigma", w3 is None, w3),
    ]
    report.details.update({"simplices_outside_Y": len(picks), "rule": flow.name})
    if report.hypotheses_hold:
        hx, hy = reduced_homology(X), reduced_homology(Y)
        report.conclusion_crosscheck = {"claim": "reduced homology of X and Y agree", "pass": hx == hy,
                                        "X": hx.to_json(), "Y": hy.to_json()}
    return report


# ---------------------------------------------------------------- wCM and ordered complexes


@dataclass
class WcmResult:
    level: Fraction
    holds: bool
    ledger: list[dict]
    binding: Optional[dict]

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"level": str(self.level), "wCM": self.holds, "binding": _jsonable(self.binding),
                "ledger": _jsonable(self.ledger)}


def is_wCM(X: SimplicialComplex, n: Union[int, Fraction, float]) -> WcmResult:
    """(floor(n) - 1)-connected, with links of k-simplices (floor(n) - k - 2)-connected."""
    level = Fraction(n)
    m = math.floor(level)
    ledger = []
    c = connectivity(X, pi1=False)
    ledger.append({"simplex": None, "required": m - 1, "connectivity": c.homological_connectivity,
                   "acyclic": c.acyclic, "ok": c.at_least(m - 1)})
    for s in X.faces():
        k = len(s) - 1
        need = m - k - 2
        if need <= -2:
            continue
        cl = connectivity(link(X, s), pi1=False)
        ledger.append({"simplex": s, "required": need, "connectivity": cl.homological_connectivity,
                       "acyclic": cl.acyclic, "ok": cl.at_least(need)})
    holds = all(e["ok"] for e in ledger)
    fails = [e for e in ledger if not e["ok"]]

    def slack(e):
        return math.inf if e["acyclic"] else e["connectivity"] - e["required"]

    binding = fails[0] if fails else min(ledger, key=slack)
    return WcmResult(level, holds, ledger, binding)


def ordered_connectivity_test(X: SimplicialComplex, n: int, budget: int | None = None) -> Report:
    report = Report(f"ordered complex of a wCM complex of level {n} is {n - 1}-connected")
    w = is_wCM(X, n)
    report.hypotheses.append(Hypothesis(f"X is wCM of level {n}", w.holds, None if w.holds else w.binding))
    report.binding_constraint = w.binding
    cx = connectivity(X, pi1=False)
    report.details["conn_X"] = cx.homological_connectivity
    if w.holds:
        c = connectivity(ordered(X, budget), pi1=False)
        report.details["conn_X_ord"] = c.homological_connectivity
        report.conclusion_crosscheck = {"claim": f"X^ord is {n - 1}-connected", "pass": c.at_least(n - 1),
                                        "certificate": c.to_json()}
    return report


# ---------------------------------------------------------------- relative injectivity


@dataclass
class InjectivityResult:
    holds: bool
    witness: Optional[Simplex]
    link_condition: bool
    link_witness: Optional[int]
    z_full: bool

    def __bool__(self) -> bool:
        return self.holds

    @property
    def equivalent(self) -> bool:
        return self.holds == self.link_condition

    def to_json(self) -> dict:
        return {"holds": self.holds, "witness": _jsonable(self.witness), "link_condition": self.link_condition,
                "link_witness": self.link_witness, "z_full": self.z_full}


def simplexwise_injective_rel(f: SimplicialMap, Z: SimplicialComplex) -> InjectivityResult:
    """Edge condition: an edge collapsed by f lies in Z.

    The link form (f(lk v) inside lk f(v) for vertices v off Z) is computed
    too. The two agree whenever Z is a full subcomplex; for non-full Z an
    edge joining two vertices of Z may be collapsed without lying in Z, which
    only the edge form detects.
    """
    Y = f.source
    if not Z.is_subcomplex_of(Y):
        raise MalformedInputError("Z is not a subcomplex of the source")
    collapsed = [e for e in Y.faces(1) if f.vertex_map[e[0]] == f.vertex_map[e[1]]]
    witness = next((e for e in collapsed if e not in Z), None)
    zv = set(Z.vertices)
    link_witness = next((v for e in collapsed for v in e if v not in zv), None)
    z_full = all(s in Z for s in Y.faces() if set(s) <= zv)
    return InjectivityResult(witness is None, witness, link_witness is None, link_witness, z_full)


# ---------------------------------------------------------------- claims registry


@dataclass(frozen=True)
class ConnectivityClaim:
    family: str
    parameters: tuple[str, ...]
    formula: Callable[..., Fraction]
    formula_text: str
    status: str
    anchor: str

    def claimed(self, **params: int) -> Fraction:
        return Fraction(self.formula(**params))

    def floor(self, **params: int) -> int:
        return math.floor(self.claimed(**params))

    def satisfied_by(self, cert: ConnectivityCertificate, **params: int) -> bool:
        return cert.at_least(self.claimed(**params))

    def to_json(self) -> dict:
        return {"family": self.family, "parameters": list(self.parameters), "claimed": self.formula_text,
                "status": self.status, "anchor": self.anchor}


CLAIMS: tuple[ConnectivityClaim, ...] = (
    ConnectivityClaim("quotient-simplex", ("n",), lambda n: Fraction(n - 2), "n-2", "verified-at",
                      "simplex with all k-faces identified, 1 <= n <= 8"),
    ConnectivityClaim("labeled-simplex", ("p",), lambda p: Fraction(p - 1), "p-1", "verified-at",
                      "(Delta^p)^S for p <= 3, |S| in {2, 3}; sharp"),
    ConnectivityClaim("tether", ("n", "d"), lambda n, d: Fraction(10**9), "contractible", "verified-at",
                      "T_{n,d} truncations, n <= 3, homology only"),
    ConnectivityClaim("coconnected-tether", ("n",), lambda n: Fraction(10**9), "contractible", "verified-at",
                      "T^0_{n,1} truncations, n <= 3, homology only"),
    ConnectivityClaim("wedge-model", ("g",), lambda g: Fraction(g - 2), "g-2", "verified-at",
                      "join of g discrete sets, g <= 4"),
    ConnectivityClaim("arc-complex", ("g", "s"), lambda g, s: Fraction(10**9), "contractible", "registry-only",
                      "arc complex rel a boundary component, positive genus"),
    ConnectivityClaim("curve-complex", ("g",), lambda g: Fraction(g - 2), "g-2", "registry-only",
                      "curve complex of a closed genus g surface"),
    ConnectivityClaim("coconnected-curves", ("g",), lambda g: Fraction(g - 2), "g-2", "registry-only",
                      "complex of coconnected curve systems"),
    ConnectivityClaim("chains", ("g",), lambda g: Fraction(g - 3, 2), "(g-3)/2", "registry-only",
                      "chain complex Ch(S); at g = 2 only nonemptiness is asserted and witnessed"),
    ConnectivityClaim("ordered-wcm", ("n",), lambda n: Fraction(n - 1), "n-1", "verified-at",
                      "ordered complex of a wCM complex of level n, n <= 3"),
)


def claim(family: str) -> ConnectivityClaim:
    for c in CLAIMS:
        if c.family == family:
            return c
    raise NotFoundError(f"no registered claim for {family!r}")
