"""Integer homology through sparse Smith normal form.

Boundary matrices are stored as row dictionaries. Elimination first clears
every unit pivot it can find (cheapest rows first), then falls back to
minimal-absolute-value pivoting on whatever is left, which for complexes
seen in practice is tiny.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .complexes import SemiSimplicialComplex, SimplicialComplex, Simplex
from .errors import MalformedInputError

Complex = Union[SimplicialComplex, SemiSimplicialComplex]

DEFAULT_TIETZE_BUDGET = 10**4


@dataclass(frozen=True)
class SparseIntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        clean = []
        for r, c, v in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise MalformedInputError(f"entry ({r}, {c}) out of range")
            if (r, c) in seen:
                raise MalformedInputError(f"duplicate entry at ({r}, {c})")
            seen.add((r, c))
            if v:
                clean.append((int(r), int(c), int(v)))
        object.__setattr__(self, "entries", tuple(sorted(clean)))

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        return cls(nr, nc, tuple((i, j, v) for i, row in enumerate(rows) for j, v in enumerate(row) if v))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def row_dicts(self) -> dict[int, dict[int, int]]:
        out: dict[int, dict[int, int]] = defaultdict(dict)
        for r, c, v in self.entries:
            out[r][c] = v
        return dict(out)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise MalformedInputError("shape mismatch")
        right = other.row_dicts()
        acc: dict[tuple[int, int], int] = defaultdict(int)
        for r, k, v in self.entries:
            for c, w in right.get(k, {}).items():
                acc[(r, c)] += v * w
        return SparseIntMatrix(self.rows, other.cols, tuple((r, c, v) for (r, c), v in acc.items() if v))

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class FgAbelianGroup:
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        t = tuple(int(x) for x in self.torsion)
        if self.rank < 0 or any(x < 2 for x in t):
            raise MalformedInputError(f"bad group data rank={self.rank} torsion={t}")
        if any(b % a for a, b in zip(t, t[1:])):
            raise MalformedInputError(f"torsion {t} is not a divisibility chain")
        object.__setattr__(self, "torsion", t)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = (["Z^%d" % self.rank if self.rank > 1 else "Z"] if self.rank else []) + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


ZERO = FgAbelianGroup()
Z = FgAbelianGroup(1)


@dataclass(frozen=True)
class HomologyProfile:
    reduced: bool
    groups: Mapping[int, FgAbelianGroup] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", {k: g for k, g in sorted(self.groups.items()) if not g.is_trivial()})

    def __getitem__(self, k: int) -> FgAbelianGroup:
        return self.groups.get(k, ZERO)

    def rank(self, k: int) -> int:
        return self[k].rank

    def is_trivial(self) -> bool:
        return not self.groups

    def betti(self) -> dict[int, int]:
        return {k: g.rank for k, g in self.groups.items()}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, HomologyProfile) and self.reduced == other.reduced and self.groups == other.groups

    def __hash__(self) -> int:
        return hash((self.reduced, tuple(self.groups.items())))

    def to_json(self) -> dict:
        return {"reduced": self.reduced, "groups": {str(k): g.to_json() for k, g in self.groups.items()}}

    def to_csv(self, max_dim: int | None = None) -> str:
        top = max([max_dim if max_dim is not None else -1] + list(self.groups))
        lo = min([0] + list(self.groups))
        lines = ["dimension,rank,torsion"]
        for k in range(lo, top + 1):
            g = self[k]
            lines.append(f"{k},{g.rank},{';'.join(str(d) for d in g.torsion)}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- Smith normal form


class _RowMatrix:
    """Mutable sparse matrix with row dicts and column occupancy sets."""

    def __init__(self, rows: Mapping[int, Mapping[int, int]]):
        self.rows = {r: dict(e) for r, e in rows.items() if e}
        self.cols: dict[int, set[int]] = defaultdict(set)
        for r, e in self.rows.items():
            for c in e:
                self.cols[c].add(r)

    def add_row(self, dst: int, src: int, f: int) -> None:
        """row dst -= f * row src"""
        d = self.rows[dst]
        for c, x in list(self.rows[src].items()):
            nv = d.get(c, 0) - f * x
            if nv:
                if c not in d:
                    self.cols[c].add(dst)
                d[c] = nv
            elif c in d:
                del d[c]
                self.cols[c].discard(dst)

    def add_col(self, dst: int, src: int, f: int) -> None:
        """col dst -= f * col src"""
        for r in list(self.cols[src]):
            row = self.rows[r]
            nv = row.get(dst, 0) - f * row[src]
            if nv:
                if dst not in row:
                    self.cols[dst].add(r)
                row[dst] = nv
            elif dst in row:
                del row[dst]
                self.cols[dst].discard(r)

    def drop(self, r: int, c: int) -> None:
        for c2 in self.rows.pop(r):
            self.cols[c2].discard(r)
        for r2 in self.cols.pop(c, set()):
            self.rows[r2].pop(c, None)

    def nonempty(self) -> bool:
        return any(self.rows.values())


def _unit_phase(m: _RowMatrix) -> int:
    count = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(m.cols, key=lambda c: (len(m.cols[c]), c)):
            rs = m.cols.get(c)
            if not rs:
                continue
            best = None
            for r in rs:
                if m.rows[r][c] in (1, -1) and (best is None or len(m.rows[r]) < len(m.rows[best])):
                    best = r
            if best is None:
                continue
            v = m.rows[best][c]
            for r2 in list(m.cols[c]):
                if r2 != best:
                    m.add_row(r2, best, m.rows[r2][c] * v)
            m.drop(best, c)
            count += 1
            progress = True
    return count


def _general_phase(m: _RowMatrix) -> list[int]:
    diag = []
    m.rows = {r: e for r, e in m.rows.items() if e}
    while m.rows:
        r, c, p = min(((r, c, v) for r, e in m.rows.items() for c, v in e.items()),
                      key=lambda t: (abs(t[2]), len(m.rows[t[0]]) * len(m.cols[t[1]]), t[0], t[1]))
        for r2 in list(m.cols[c]):
            if r2 != r:
                m.add_row(r2, r, m.rows[r2][c] // p)
        for c2 in list(m.rows[r]):
            if c2 != c:
                m.add_col(c2, c, m.rows[r][c2] // p)
        if len(m.rows[r]) == 1 and len(m.cols[c]) == 1:
            diag.append(abs(p))
            m.drop(r, c)
        m.rows = {r: e for r, e in m.rows.items() if e}
    return diag


def divisibility_chain(values: Iterable[int]) -> list[int]:
    d = sorted(abs(v) for v in values if v)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = math.gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return d


def invariant_factors(M: SparseIntMatrix) -> list[int]:
    m = _RowMatrix(M.row_dicts())
    units = _unit_phase(m)
    rest = _general_phase(m)
    return [1] * units + [x for x in divisibility_chain(rest)]


@dataclass(frozen=True)
class SmithForm:
    factors: tuple[int, ...]
    U: SparseIntMatrix | None = None
    V: SparseIntMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.factors)

    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d > 1)


def smith_normal_form(M: SparseIntMatrix, transforms: bool = False) -> SmithForm:
    """Nonzero invariant factors d_1 | d_2 | ...; with transforms, U M V = diag."""
    if not transforms:
        return SmithForm(tuple(invariant_factors(M)))
    return _smith_with_transforms(M)


def _smith_with_transforms(M: SparseIntMatrix) -> SmithForm:
    # Dense elimination that records the row and column operations.
    A = M.to_dense()
    nr, nc = M.rows, M.cols
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(dst, src, f):
        A[dst] = [a - f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - f * b for a, b in zip(U[dst], U[src])]

    def col_op(dst, src, f):
        for row in A:
            row[dst] -= f * row[src]
        for row in V:
            row[dst] -= f * row[src]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        nz = [(abs(A[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, nr):
                if A[i][t]:
                    row_op(i, t, A[i][t] // p)
            for j in range(t + 1, nc):
                if A[t][j]:
                    col_op(j, t, A[t][j] // p)
            rem = [(abs(A[i][t]), i, t) for i in range(t + 1, nr) if A[i][t]]
            rem += [(abs(A[t][j]), t, j) for j in range(t + 1, nc) if A[t][j]]
            if not rem:
                break
            _, i, j = min(rem)
            swap_rows(t, i)
            swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    rank = t
    # gcd/lcm repair of the diagonal with 2x2 unimodular moves
    for i in range(rank):
        for j in range(i + 1, rank):
            a, b = A[i][i], A[j][j]
            if b % a == 0:
                continue
            g, x, y = _xgcd(a, b)
            # rows: [x y; -b/g a/g], cols: [1 -y b/g; 1 x a/g]
            Ui, Uj = U[i][:], U[j][:]
            U[i] = [x * p + y * q for p, q in zip(Ui, Uj)]
            U[j] = [(-b // g) * p + (a // g) * q for p, q in zip(Ui, Uj)]
            for row in V:
                vi, vj = row[i], row[j]
                row[i] = vi + vj
                row[j] = (-y * b // g) * vi + (x * a // g) * vj
            A[i][i], A[j][j] = g, a * b // g
    factors = tuple(A[i][i] for i in range(rank))
    return SmithForm(factors, SparseIntMatrix.from_dense(U) if nr else SparseIntMatrix(0, 0),
                     SparseIntMatrix.from_dense(V) if nc else SparseIntMatrix(0, 0))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


# ---------------------------------------------------------------- chain complexes


def _cell_bases(K: Complex) -> dict[int, int]:
    if isinstance(K, SimplicialComplex):
        return {k: c for k, c in enumerate(K.f_vector())}
    return {k: len(v) for k, v in K.cells.items()}


def boundary_matrices(K: Complex, reduced: bool = True) -> list[SparseIntMatrix]:
    """Entry k is the matrix of d_k: C_k -> C_{k-1}; entry 0 is the augmentation when reduced."""
    mats: list[SparseIntMatrix] = []
    if isinstance(K, SimplicialComplex):
        by_dim: dict[int, list[Simplex]] = defaultdict(list)
        for s in K.faces():
            by_dim[len(s) - 1].append(s)
        index = {s: i for k in by_dim for i, s in enumerate(by_dim[k])}
        top = K.dimension
        n0 = len(by_dim.get(0, []))
        mats.append(SparseIntMatrix(1 if reduced else 0, n0, tuple((0, i, 1) for i in range(n0)) if reduced else ()))
        for k in range(1, top + 1):
            ents = []
            for j, s in enumerate(by_dim[k]):
                for i in range(k + 1):
                    ents.append((index[s[:i] + s[i + 1:]], j, -1 if i % 2 else 1))
            mats.append(SparseIntMatrix(len(by_dim[k - 1]), len(by_dim[k]), tuple(ents)))
        return mats
    pos = {k: {c: i for i, c in enumerate(v)} for k, v in K.cells.items()}
    n0 = len(K.cells.get(0, ()))
    mats.append(SparseIntMatrix(1 if reduced else 0, n0, tuple((0, i, 1) for i in range(n0)) if reduced else ()))
    for k in range(1, K.dimension + 1):
        acc: dict[tuple[int, int], int] = defaultdict(int)
        for c in K.cells[k]:
            for i, f in enumerate(K.faces[k][c]):
                acc[(pos[k - 1][f], pos[k][c])] += -1 if i % 2 else 1
        mats.append(SparseIntMatrix(len(K.cells[k - 1]), len(K.cells[k]),
                                    tuple((r, c, v) for (r, c), v in acc.items() if v)))
    return mats


def chain_homology(sizes: Mapping[int, int], mats: Mapping[int, SparseIntMatrix], reduced: bool) -> HomologyProfile:
    """Homology of a chain complex given ranks of chain groups and boundary matrices d_k."""
    facts = {k: invariant_factors(M) for k, M in mats.items()}
    groups = {}
    for k, n in sizes.items():
        rk_out = len(facts.get(k, ()))
        inc = facts.get(k + 1, [])
        groups[k] = FgAbelianGroup(n - rk_out - len(inc), tuple(d for d in inc if d > 1))
    return HomologyProfile(reduced, groups)


def homology(K: Complex, reduced: bool = False) -> HomologyProfile:
    if K.is_empty():
        return HomologyProfile(reduced, {-1: Z} if reduced else {})
    mats = boundary_matrices(K, reduced)
    sizes = dict(_cell_bases(K))
    dm = {k: M for k, M in enumerate(mats) if M.rows}
    if reduced:
        sizes[-1] = 1
    groups = chain_homology(sizes, dm, reduced).groups
    return HomologyProfile(reduced, groups)


def reduced_homology(K: Complex) -> HomologyProfile:
    return homology(K, reduced=True)


def relative_homology(X: SimplicialComplex, Y: SimplicialComplex) -> HomologyProfile:
    """H_*(X, Y) from the quotient chain complex C(X)/C(Y)."""
    cells: dict[int, list[Simplex]] = defaultdict(list)
    for s in X.faces():
        if s not in Y:
            cells[len(s) - 1].append(s)
    index = {s: i for k in cells for i, s in enumerate(cells[k])}
    mats = {}
    for k in cells:
        if k == 0:
            continue
        ents = []
        for j, s in enumerate(cells[k]):
            for i in range(k + 1):
                f = s[:i] + s[i + 1:]
                if f in index:
                    ents.append((index[f], j, -1 if i % 2 else 1))
        mats[k] = SparseIntMatrix(len(cells.get(k - 1, [])), len(cells[k]), tuple(ents))
    return chain_homology({k: len(v) for k, v in cells.items()}, mats, reduced=False)


# ---------------------------------------------------------------- connectivity


@dataclass(frozen=True)
class ConnectivityCertificate:
    homological_connectivity: int
    pi1_status: str
    dimension: int
    acyclic: bool

    def at_least(self, r: float) -> bool:
        """Whether the certificate meets an r-connectivity requirement (floor semantics)."""
        need = math.floor(r)
        if need <= -2:
            return True
        if self.homological_connectivity == -2:
            return False
        return self.acyclic or self.homological_connectivity >= need

    def to_json(self) -> dict:
        return {"homological_connectivity": self.homological_connectivity, "pi1_status": self.pi1_status,
                "dimension": self.dimension, "acyclic": self.acyclic}


def connectivity(K: Complex, pi1: bool = True, tietze_budget: int = DEFAULT_TIETZE_BUDGET) -> ConnectivityCertificate:
    if K.is_empty():
        return ConnectivityCertificate(-2, "unknown", -1, False)
    H = reduced_homology(K)
    dim = K.dimension
    conn = -1
    while conn < dim and H[conn + 1].is_trivial():
        conn += 1
    acyclic = H.is_trivial()
    if not pi1:
        status = "unknown"
    elif not H[0].is_trivial() or not H[1].is_trivial():
        status = "nontrivial" if not H[1].is_trivial() else fundamental_group_status(K, tietze_budget)
    else:
        status = fundamental_group_status(K, tietze_budget)
    return ConnectivityCertificate(conn, status, dim, acyclic)


def _two_skeleton(K: Complex) -> tuple[list[int], list[tuple[int, int]], list[tuple[int, int, int]]]:
    """Vertices, oriented edges (tail, head) and triangles as edge triples (e01, e12, e02)."""
    if isinstance(K, SimplicialComplex):
        verts = list(K.vertices)
        edges = K.faces(1)
        eidx = {e: i for i, e in enumerate(edges)}
        tris = [(eidx[(a, b)], eidx[(b, c)], eidx[(a, c)]) for a, b, c in K.faces(2)]
        return verts, edges, tris
    verts = list(K.cells.get(0, ()))
    e_ids = list(K.cells.get(1, ()))
    epos = {e: i for i, e in enumerate(e_ids)}
    edges = [(K.face(1, e, 1), K.face(1, e, 0)) for e in e_ids]
    tris = []
    for t in K.cells.get(2, ()):
        d0, d1, d2 = K.faces[2][t]
        tris.append((epos[d2], epos[d0], epos[d1]))
    return verts, edges, tris


def fundamental_group_status(K: Complex, budget: int = DEFAULT_TIETZE_BUDGET) -> str:
    """'trivial', 'nontrivial' or 'unknown' for the free product of the component groups."""
    verts, edges, tris = _two_skeleton(K)
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    gen_of: dict[int, int] = {}
    for i, (a, b) in enumerate(edges):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
        else:
            gen_of[i] = len(gen_of) + 1
    rels = []
    for e01, e12, e02 in tris:
        w = []
        for e, sgn in ((e01, 1), (e12, 1), (e02, -1)):
            if e in gen_of:
                w.append(sgn * gen_of[e])
        rels.append(w)
    return _tietze(set(gen_of.values()), rels, budget)


def _cyc_reduce(w: list[int]) -> list[int]:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    while len(out) >= 2 and out[0] == -out[-1]:
        out = out[1:-1]
    return out


def _tietze(gens: set[int], rels: list[list[int]], budget: int) -> str:
    rels = [r for r in (_cyc_reduce(r) for r in rels) if r]
    moves = 0
    while gens:
        if moves > budget:
            return "unknown"
        target = None
        for r in sorted(rels, key=len):
            counts: dict[int, int] = defaultdict(int)
            for x in r:
                counts[abs(x)] += 1
            single = [g for g, c in counts.items() if c == 1]
            if single:
                target = (r, min(single))
                break
        if target is None:
            used = {abs(x) for r in rels for x in r}
            return "nontrivial" if gens - used else "unknown"
        r, g = target
        k = next(i for i, x in enumerate(r) if abs(x) == g)
        rot = r[k:] + r[:k]
        rest = rot[1:]
        # rot[0] * rest = 1, so rot[0] = rest^-1
        repl = [-x for x in reversed(rest)] if rot[0] > 0 else list(rest)
        new = []
        for s in rels:
            if s is r:
                continue
            w: list[int] = []
            for x in s:
                if abs(x) == g:
                    w.extend(repl if x > 0 else [-y for y in reversed(repl)])
                else:
                    w.append(x)
            w = _cyc_reduce(w)
            if w:
                new.append(w)
            moves += 1
        rels = new
        gens.discard(g)
        moves += 1
        if sum(len(x) for x in rels) > 50 * budget:
            return "unknown"
    return "trivial"
