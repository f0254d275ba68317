"""Bookkeeping for the equivariant spectral sequence of a transitive action.

Group homology is never computed here. Tables of groups (concrete or
symbolic) go in, and the module tracks E1 pages, first differentials,
the range arithmetic for stability, and the braid induction.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import MalformedInputError, UnsupportedInputError
from .homology import ZERO, FgAbelianGroup, SparseIntMatrix, Z, chain_homology
from .toolbox import Hypothesis, Report, _jsonable

KINDS = ("zero", "iso", "inclusion", "unknown")
Entry = Optional[FgAbelianGroup]  # None means symbolic
D1 = Union[str, SparseIntMatrix]


# ---------------------------------------------------------------- tables


@dataclass
class GroupHomologyTable:
    """H_q(G_m) entries and the kinds of the stabilization maps H_q(G_m) -> H_q(G_{m+1})."""

    entries: dict[tuple[int, int], Entry] = field(default_factory=dict)
    map_kinds: dict[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for (m, q), g in self.entries.items():
            if m < 0 or q < 0:
                raise MalformedInputError(f"negative index ({m}, {q})")
            if q == 0 and g is not None and g != Z:
                raise MalformedInputError(f"H_0(G_{m}) must be Z, got {g}")
        for key, k in self.map_kinds.items():
            if k not in KINDS:
                raise MalformedInputError(f"unknown map kind {k!r} at {key}")

    def entry(self, m: int, q: int) -> Entry:
        if m < 0 or q < 0:
            raise MalformedInputError(f"negative index ({m}, {q})")
        if q == 0:
            return Z
        return self.entries.get((m, q))

    def map_kind(self, m: int, q: int) -> str:
        if q == 0:
            return "iso"
        return self.map_kinds.get((m, q), "unknown")

    @classmethod
    def trivial(cls, mmax: int, qmax: int) -> "GroupHomologyTable":
        ents = {(m, q): ZERO for m in range(mmax + 1) for q in range(1, qmax + 1)}
        kinds = {(m, q): "iso" for m in range(mmax + 1) for q in range(qmax + 1)}
        return cls(ents, kinds)


# ---------------------------------------------------------------- pages


def _is_zero(g: Entry) -> bool:
    return g is not None and g.is_trivial()


@dataclass
class E1Page:
    """Columns p = -1..n-1, rows q = 0..qmax. ``d1[(p, q)]`` is the map E_{p,q} -> E_{p-1,q}."""

    n: int
    qmax: int
    grid: dict[tuple[int, int], Entry]
    d1: dict[tuple[int, int], D1]
    labels: dict[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1 or self.qmax < 0:
            raise MalformedInputError("need n >= 1 and qmax >= 0")
        want = {(p, q) for p in range(-1, self.n) for q in range(self.qmax + 1)}
        if set(self.grid) != want:
            raise MalformedInputError("grid does not cover columns -1..n-1 and rows 0..qmax")
        for (p, q), k in self.d1.items():
            if (p, q) not in want or p < 0:
                raise MalformedInputError(f"d1 at {(p, q)} is outside the page")
            if isinstance(k, SparseIntMatrix):
                src, dst = self.grid[(p, q)], self.grid[(p - 1, q)]
                if src is None or dst is None or src.torsion or dst.torsion:
                    raise MalformedInputError("matrix differentials need free concrete entries")
                if (k.rows, k.cols) != (dst.rank, src.rank):
                    raise MalformedInputError(f"d1 at {(p, q)} has the wrong shape")
            elif k not in KINDS:
                raise MalformedInputError(f"unknown d1 kind {k!r}")

    @property
    def columns(self) -> range:
        return range(-1, self.n)

    def kind(self, p: int, q: int) -> D1:
        """Effective kind: a map out of or into a zero group is zero."""
        if p < 0 or p >= self.n or q < 0 or q > self.qmax:
            return "zero"
        if _is_zero(self.grid[(p, q)]) or _is_zero(self.grid[(p - 1, q)]):
            return "zero"
        return self.d1.get((p, q), "unknown")

    def _row_concrete(self, q: int) -> bool:
        for p in self.columns:
            g = self.grid[(p, q)]
            if g is None or g.torsion:
                return False
            k = self.kind(p, q)
            if p >= 0 and k not in ("zero", "iso") and not isinstance(k, SparseIntMatrix):
                return False
            if k == "iso" and self.grid[(p - 1, q)] != g:
                return False
        return True

    def row_homology(self, q: int) -> dict[int, Entry]:
        """E2 along row q, None where it is not determined by the data."""
        if self._row_concrete(q):
            sizes = {p + 1: self.grid[(p, q)].rank for p in self.columns}
            mats = {}
            for p in range(0, self.n):
                k = self.kind(p, q)
                r, c = sizes[p], sizes[p + 1]
                if isinstance(k, SparseIntMatrix):
                    mats[p + 1] = k
                elif k == "iso":
                    mats[p + 1] = SparseIntMatrix(r, c, tuple((i, i, 1) for i in range(c)))
                else:
                    mats[p + 1] = SparseIntMatrix(r, c)
            prof = chain_homology(sizes, mats, reduced=False)
            return {p: prof[p + 1] for p in self.columns}
        out: dict[int, Entry] = {}
        for p in self.columns:
            g = self.grid[(p, q)]
            out_k, in_k = self.kind(p, q), self.kind(p + 1, q)
            if _is_zero(g) or out_k == "iso" or (out_k == "zero" and in_k == "iso"):
                out[p] = ZERO
            elif out_k == "zero" and in_k == "zero":
                out[p] = g
            else:
                out[p] = None
        return out

    def e2(self) -> dict[tuple[int, int], Entry]:
        out = {}
        for q in range(self.qmax + 1):
            for p, g in self.row_homology(q).items():
                out[(p, q)] = g
        return out

    def higher_partners(self, p: int, q: int) -> list[tuple[int, int]]:
        """Cells joined to (p, q) by some d^r with r >= 2."""
        out = []
        for r in range(2, self.n + 2):
            for cell in ((p - r, q + r - 1), (p + r, q - r + 1)):
                if cell in self.grid:
                    out.append(cell)
        return out

    def to_json(self) -> dict:
        def ent(cell):
            g = self.grid[cell]
            return g.to_json() if g is not None else {"symbol": self.labels.get(cell, "?")}

        def kd(k):
            return k.to_dense() if isinstance(k, SparseIntMatrix) else k

        e2 = self.e2()
        return {
            "n": self.n,
            "qmax": self.qmax,
            "grid": {f"{p},{q}": ent((p, q)) for (p, q) in sorted(self.grid)},
            "d1": {f"{p},{q}": kd(self.kind(p, q)) for (p, q) in sorted(self.grid) if p >= 0},
            "e2": {f"{p},{q}": (g.to_json() if g is not None else None) for (p, q), g in sorted(e2.items())},
        }


def e1_page(n: int, table: GroupHomologyTable, qmax: int, alternating: bool = False) -> E1Page:
    """E^1_{p,q} = H_q(G_{n-p-1}).

    Only the p = 0 differential is known in general (it is the stabilization).
    With ``alternating`` every face map is taken to be the same, so d1 is zero
    for odd p and the stabilization H_q(G_{n-p-1}) -> H_q(G_{n-p}) for even p.
    """
    if n < 1 or qmax < 0:
        raise MalformedInputError("need n >= 1 and qmax >= 0")
    grid, labels, d1 = {}, {}, {}
    for p in range(-1, n):
        for q in range(qmax + 1):
            grid[(p, q)] = table.entry(n - p - 1, q)
            labels[(p, q)] = f"H_{q}(G_{n - p - 1})"
            if p < 0:
                continue
            if p == 0 or (alternating and p % 2 == 0):
                k = table.map_kind(n - p - 1, q)
                d1[(p, q)] = "inclusion" if k == "unknown" else k
            elif alternating:
                d1[(p, q)] = "zero"
            else:
                d1[(p, q)] = "unknown"
    return E1Page(n, qmax, grid, d1, labels)


def convergence_audit(page: E1Page, target_zero: Callable[[int, int], bool]) -> Report:
    """Look for concrete nonzero E2 classes in the target-zero range that nothing can kill."""
    e2 = page.e2()
    stranded = []
    for cell in sorted(page.grid):
        g = e2[cell]
        if g is None or g.is_trivial() or not target_zero(*cell):
            continue
        if all(_is_zero(e2[c]) for c in page.higher_partners(*cell)):
            stranded.append({"cell": list(cell), "group": str(g)})
    assigned = all(page.kind(p, q) != "unknown" for (p, q) in page.grid if p >= 0)
    symbolic = [list(c) for c, g in sorted(e2.items()) if g is None]
    return Report(
        statement="the spectral sequence converges to zero on the target range",
        hypotheses=[
            Hypothesis("d1 kinds assigned", assigned),
            Hypothesis("no stranded E2 class in the target-zero range", not stranded, stranded or None),
        ],
        details={"e2": page.to_json()["e2"], "symbolic_cells": symbolic},
    )


# ---------------------------------------------------------------- range arithmetic


@dataclass(frozen=True)
class Affine:
    """x -> a*n + b, used for connectivity as a function of n."""

    a: Fraction
    b: Fraction
    text: str = ""

    def __call__(self, n: int) -> Fraction:
        return self.a * n + self.b

    def conn(self, n: int) -> int:
        # a space that is x-connected is floor(x)-connected
        return math.floor(self(n))

    def __str__(self) -> str:
        return self.text or f"{self.a}*n + {self.b}"


_OPS = {ast.Add: lambda x, y: x + y, ast.Sub: lambda x, y: x - y,
        ast.Mult: lambda x, y: x * y, ast.Div: lambda x, y: x / y}


def _eval(node: ast.AST, n: Fraction) -> Fraction:
    if isinstance(node, ast.Expression):
        return _eval(node.body, n)
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left, n), _eval(node.right, n))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, n)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value)
    if isinstance(node, ast.Name) and node.id == "n":
        return n
    raise MalformedInputError(f"unsupported token in formula: {ast.dump(node)}")


def parse_affine(text: Union[str, Affine]) -> Affine:
    if isinstance(text, Affine):
        return text
    try:
        tree = ast.parse(str(text).replace(" ", ""), mode="eval")
        f = lambda n: _eval(tree, Fraction(n))  # noqa: E731
        b = f(0)
        a = f(1) - b
    except (SyntaxError, ZeroDivisionError) as e:
        raise MalformedInputError(f"cannot parse formula {text!r}: {e}") from None
    if any(f(k) != a * k + b for k in (2, 3, 7)):
        raise MalformedInputError(f"formula {text!r} is not affine in n")
    return Affine(a, b, str(text))


DEFAULT_CONDITIONS = {
    1: (True, "X_n has dimension n-1 and G_n acts transitively on simplices of each dimension"),
    2: (True, "the stabilizer of a simplex fixes it pointwise and is the group of smaller index"),
    3: (True, "face inclusions of stabilizers are conjugate to the standard stabilization"),
}


@dataclass
class StabilityHypotheses:
    cX: Union[str, Affine] = "n-3"
    cQuotient: Union[str, Affine] = "n-2"
    conditions: dict[int, tuple[bool, str]] = field(default_factory=lambda: dict(DEFAULT_CONDITIONS))
    coefficients: str = "untwisted"

    def __post_init__(self) -> None:
        if self.coefficients != "untwisted":
            # stabilizers fix simplices pointwise, so orientation characters never appear
            raise UnsupportedInputError("twisted coefficients are not supported")
        self.cX = parse_affine(self.cX)
        self.cQuotient = parse_affine(self.cQuotient)

    @property
    def conditional(self) -> bool:
        return not all(ok for ok, _ in self.conditions.values())


@dataclass
class StabilityReport:
    feasible: bool
    c: Optional[int]
    conditional: bool
    ledger: list[dict]
    binding: Optional[dict]
    reason: str
    cX: str
    cQuotient: str
    imax: int

    def phi(self, i: int) -> Optional[int]:
        return None if self.c is None else 2 * i + self.c

    @property
    def statement(self) -> str:
        if self.c is None:
            return "no admissible constant"
        return f"isomorphism for n > 2i+{self.c}, surjection for n = 2i+{self.c}"

    def to_json(self) -> dict:
        return _jsonable({
            "feasible": self.feasible, "c": self.c, "conditional": self.conditional,
            "statement": self.statement, "reason": self.reason, "cX": self.cX,
            "cQuotient": self.cQuotient, "imax": self.imax, "binding": self.binding, "ledger": self.ledger,
        })


def _ledger(h: StabilityHypotheses, c: int, imax: int) -> list[dict]:
    X, Q = h.cX, h.cQuotient
    rows = []
    for i in range(1, imax + 1):
        n = 2 * i + c
        checks = [
            ("phi(i) >= phi(i-1) + 2", n, n, 2 * (i - 1) + c + 2),
            ("surjectivity: c(X_n) >= i-1", n, X.conn(n), i - 1),
            ("surjectivity: c(X_n/G_n) >= i", n, Q.conn(n), i),
            ("injectivity: c(X_n) >= i", n + 1, X.conn(n + 1), i),
            ("injectivity: c(X_n/G_n) >= i+1", n + 1, Q.conn(n + 1), i + 1),
        ]
        for name, at, lhs, rhs in checks:
            rows.append({"i": i, "constraint": name, "n": at, "lhs": lhs, "rhs": rhs, "pass": lhs >= rhs})
    return rows


def _first_failure(h: StabilityHypotheses, c: int, limit: int = 10_000) -> Optional[dict]:
    for i in range(1, limit + 1):
        bad = [r for r in _ledger_row(h, c, i) if not r["pass"]]
        if bad:
            return bad[0]
    return None


def _ledger_row(h: StabilityHypotheses, c: int, i: int) -> list[dict]:
    return [r for r in _ledger(h, c, i) if r["i"] == i]


def stability_ranges(h: StabilityHypotheses, imax: int, c_min: int = -10, c_cap: int = 50) -> StabilityReport:
    """Least c such that phi(i) = 2i + c satisfies every inequality for 1 <= i <= imax.

    The inequalities only get easier with i when both connectivity slopes are
    at least 1/2; with a smaller slope every c eventually fails, and the
    report says so with the first failing inequality for the best c.
    """
    if imax < 1:
        raise MalformedInputError("imax must be >= 1")
    base = dict(cX=str(h.cX), cQuotient=str(h.cQuotient), imax=imax, conditional=h.conditional)
    binding = None
    found = None
    for c in range(c_min, c_cap + 1):
        rows = _ledger(h, c, imax)
        bad = [r for r in rows if not r["pass"]]
        if not bad:
            found = (c, rows)
            break
        binding = dict(bad[0], c=c)
    if found is None:
        return StabilityReport(False, None, reason=f"no admissible c <= {c_cap} for i <= {imax}",
                               ledger=[], binding=binding, **base)
    c, rows = found
    slopes = {"c(X_n)": h.cX.a, "c(X_n/G_n)": h.cQuotient.a}
    shallow = {k: str(a) for k, a in slopes.items() if a < Fraction(1, 2)}
    if shallow:
        fail = _first_failure(h, c)
        return StabilityReport(False, None, reason=f"connectivity slope below 1/2: {shallow}; "
                               f"every constant fails for large i", ledger=rows,
                               binding=dict(fail, c=c) if fail else binding, **base)
    return StabilityReport(True, c, reason="all inequalities hold", ledger=rows, binding=binding, **base)


# ---------------------------------------------------------------- mapping class group ranges


@dataclass(frozen=True)
class MapRange:
    name: str
    description: str
    iso_from: int  # iso for g >= iso_from
    surj_at: Optional[int]

    def to_json(self) -> dict:
        return {"name": self.name, "description": self.description,
                "iso_for_g_at_least": self.iso_from, "surjection_at_g": self.surj_at}


def mcg_ranges(i: int) -> dict[str, MapRange]:
    if i < 0:
        raise MalformedInputError("degree must be nonnegative")
    return {
        "alpha": MapRange("alpha", "genus stabilization gluing a torus with two boundary circles", 2 * i + 2, None),
        "mu": MapRange("mu", "boundary stabilization gluing a pair of pants along one circle", 2 * i + 2, None),
        "kappa": MapRange("kappa", "capping a boundary circle with a disk", 2 * i + 4, 2 * i + 3),
        "beta": MapRange("beta", "genus stabilization gluing pants along two circles first", 2 * i + 2, 2 * i + 1),
    }


# ---------------------------------------------------------------- braids


@dataclass
class BraidAudit:
    n: int
    imax: int
    forced_isomorphisms: dict[int, list[int]]  # m -> degrees q with H_q(B_{m-1}) -> H_q(B_m) iso
    vanishing: dict[int, list[int]]  # m -> degrees q with H_q(B_m) = 0
    stages: list[dict]

    def iso_all_degrees(self, m: int) -> bool:
        return self.forced_isomorphisms.get(m, []) == list(range(self.imax + 1))

    def vanishing_above(self, m: int) -> bool:
        return all(q in self.vanishing.get(m, []) for q in range(m, self.imax + 1))

    def to_json(self) -> dict:
        return _jsonable({"n": self.n, "imax": self.imax, "forced_isomorphisms": self.forced_isomorphisms,
                          "vanishing": self.vanishing, "stages": self.stages})


def braid_pattern(n: int, imax: int) -> BraidAudit:
    """Run the braid induction symbolically up to B_n in degrees <= imax.

    The action on the complex of disjoint tethers is transitive with stabilizers
    B_{n-p-1}, all face maps of a simplex agree, and the complex is contractible,
    so the sequence converges to zero everywhere. Entries start as symbols
    except H_0 = Z and the homology of the trivial groups B_0 and B_1.
    """
    if n < 1 or imax < 0:
        raise MalformedInputError("need n >= 1 and imax >= 0")
    ents: dict[tuple[int, int], Entry] = {}
    kinds: dict[tuple[int, int], str] = {}
    for q in range(1, imax + 1):
        ents[(0, q)] = ents[(1, q)] = ZERO
        kinds[(0, q)] = "iso"
    stages = []
    for m in range(2, n + 1):
        table = GroupHomologyTable(dict(ents), dict(kinds))
        page = e1_page(m, table, imax, alternating=True)
        e2 = page.e2()

        def dead(cell: tuple[int, int]) -> bool:
            return _is_zero(e2[cell])

        iso, zero = [], []
        for q in range(imax + 1):
            # E2_{0,q} and E2_{-1,q} survive forever unless some d^r, r >= 2, touches them
            quiet = all(dead(c) for c in page.higher_partners(0, q) + page.higher_partners(-1, q))
            if quiet and page.kind(1, q) == "zero":
                iso.append(q)
                kinds[(m - 1, q)] = "iso"
            # H_q(B_m) sits at (-1, q) with no outgoing differentials
            if quiet and _is_zero(page.grid[(0, q)]) and q > 0:
                zero.append(q)
        for q in zero:
            ents[(m, q)] = ZERO
        stages.append({"m": m, "forced_iso_degrees": iso, "vanishing_degrees": zero,
                       "e1_columns": [-1, m - 1]})
    forced = {1: list(range(imax + 1))}
    forced.update({s["m"]: s["forced_iso_degrees"] for s in stages})
    vanishing = {m: sorted(q for (mm, q), g in ents.items() if mm == m and _is_zero(g)) for m in range(n + 1)}
    return BraidAudit(n, imax, {m: forced[m] for m in range(1, n + 1)}, vanishing, stages)
