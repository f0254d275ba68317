"""Finite simplicial and semi-simplicial complexes.

Simplices are sorted tuples of nonnegative ints. A ``SimplicialComplex``
keeps its maximal simplices and a full face index; building one that would
exceed the face budget raises ``BudgetError`` instead of truncating.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import BudgetError, MalformedInputError, NotAFaceError, UnsupportedInputError

Simplex = tuple[int, ...]

DEFAULT_FACE_BUDGET = 10**6


def face_budget(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("STABLAB_BUDGET_FACES")
    return int(env) if env else DEFAULT_FACE_BUDGET


def simplex(vertices: Iterable[int]) -> Simplex:
    vs = tuple(sorted(vertices))
    if not vs:
        raise MalformedInputError("a simplex needs at least one vertex")
    if len(set(vs)) != len(vs):
        raise MalformedInputError(f"repeated vertex in {list(vertices)}")
    if any(not isinstance(v, int) or v < 0 for v in vs):
        raise MalformedInputError(f"vertex ids must be nonnegative ints: {vs}")
    return vs


def _subfaces(s: Simplex) -> Iterable[Simplex]:
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]


class SimplicialComplex:
    """Downward-closed family of simplices, immutable after construction."""

    __slots__ = ("_faces", "_maximal", "_vertices", "_dim")

    def __init__(self, simplices: Iterable[Iterable[int]] = (), budget: int | None = None):
        limit = face_budget(budget)
        cands = sorted({simplex(s) for s in simplices}, key=lambda s: (-len(s), s))
        faces: set[Simplex] = set()
        maximal: list[Simplex] = []
        for s in cands:
            if s in faces:
                continue
            maximal.append(s)
            stack = [s]
            faces.add(s)
            while stack:
                f = stack.pop()
                if len(f) == 1:
                    continue
                for g in _subfaces(f):
                    if g not in faces:
                        faces.add(g)
                        stack.append(g)
            if len(faces) > limit:
                raise BudgetError(f"complex exceeds face budget of {limit}")
        self._faces = frozenset(faces)
        self._maximal = tuple(sorted(maximal))
        self._vertices = tuple(sorted(f[0] for f in faces if len(f) == 1))
        self._dim = max((len(s) for s in maximal), default=0) - 1

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]], budget: int | None = None) -> "SimplicialComplex":
        return cls(maximal, budget)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def maximal(self) -> tuple[Simplex, ...]:
        return self._maximal

    @property
    def dimension(self) -> int:
        """-1 for the empty complex."""
        return self._dim

    def is_empty(self) -> bool:
        return not self._faces

    def faces(self, dim: int | None = None) -> list[Simplex]:
        if dim is None:
            return sorted(self._faces, key=lambda s: (len(s), s))
        return sorted(s for s in self._faces if len(s) == dim + 1)

    def f_vector(self) -> list[int]:
        counts = [0] * (self._dim + 1)
        for s in self._faces:
            counts[len(s) - 1] += 1
        return counts

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.f_vector()))

    def __contains__(self, s: object) -> bool:
        return tuple(sorted(s)) in self._faces  # type: ignore[arg-type]

    def __len__(self) -> int:
        return len(self._faces)

    def __iter__(self):
        return iter(self.faces())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimplicialComplex) and self._faces == other._faces

    def __hash__(self) -> int:
        return hash(self._faces)

    def __repr__(self) -> str:
        return f"SimplicialComplex(maximal={[list(m) for m in self._maximal]})"

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self._faces <= other._faces

    def subcomplex(self, keep: Callable[[Simplex], bool]) -> "SimplicialComplex":
        """Largest subcomplex whose simplices all satisfy ``keep``."""
        good = {s for s in self._faces if keep(s)}
        return SimplicialComplex(s for s in good if all(f in good for f in _all_faces(s)))

    def induced(self, vertices: Iterable[int]) -> "SimplicialComplex":
        vs = set(vertices)
        return SimplicialComplex(s for s in self._faces if set(s) <= vs)

    def skeleton(self, k: int) -> "SimplicialComplex":
        return SimplicialComplex(s for s in self._faces if len(s) <= k + 1)

    def relabel(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        if len(set(mapping[v] for v in self._vertices)) != len(self._vertices):
            raise MalformedInputError("relabeling must be injective")
        return SimplicialComplex(tuple(mapping[v] for v in m) for m in self._maximal)

    def to_json(self) -> dict:
        return {"vertices": list(self._vertices), "maximal": [list(m) for m in self._maximal]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SimplicialComplex":
        try:
            verts = [int(v) for v in data.get("vertices", [])]
            maximal = [list(m) for m in data["maximal"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad simplicial complex JSON: {exc}") from exc
        X = cls(maximal + [[v] for v in verts])
        if set(verts) != set(X.vertices) and verts:
            raise MalformedInputError("vertex list disagrees with maximal simplices")
        return X


def _all_faces(s: Simplex) -> Iterable[Simplex]:
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


def from_maximal(maximal: Iterable[Iterable[int]], budget: int | None = None) -> SimplicialComplex:
    return SimplicialComplex(maximal, budget)


EMPTY = SimplicialComplex()


def boundary_of_simplex(n: int) -> SimplicialComplex:
    """The boundary of the n-simplex on vertices 0..n."""
    return SimplicialComplex(itertools.combinations(range(n + 1), n))


def full_simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex([range(n + 1)])


def discrete(k: int) -> SimplicialComplex:
    return SimplicialComplex([v] for v in range(k))


def flag_complex(vertices: Iterable[int], edges: Iterable[tuple[int, int]],
                 budget: int | None = None) -> SimplicialComplex:
    """Clique complex of a graph."""
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(vertices)
    G.add_edges_from(edges)
    return SimplicialComplex((c for c in nx.find_cliques(G)), budget)


def _check_face(X: SimplicialComplex, sigma: Iterable[int]) -> Simplex:
    s = simplex(sigma)
    if s not in X:
        raise NotAFaceError(f"{list(s)} is not a face of the complex")
    return s


def link(X: SimplicialComplex, sigma: Iterable[int]) -> SimplicialComplex:
    s = _check_face(X, sigma)
    ss = set(s)
    return SimplicialComplex(tuple(v for v in m if v not in ss) for m in X.maximal
                             if ss <= set(m) and len(m) > len(s))


def star(X: SimplicialComplex, sigma: Iterable[int]) -> SimplicialComplex:
    s = _check_face(X, sigma)
    ss = set(s)
    return SimplicialComplex(m for m in X.maximal if ss <= set(m))


def join(X: SimplicialComplex, Y: SimplicialComplex) -> SimplicialComplex:
    """Join; vertex v of Y becomes v + offset where offset = max vertex of X + 1."""
    off = join_offset(X)
    ys = [tuple(v + off for v in m) for m in Y.maximal]
    if X.is_empty():
        return SimplicialComplex(ys)
    if Y.is_empty():
        return X
    return SimplicialComplex(a + b for a in X.maximal for b in ys)


def join_offset(X: SimplicialComplex) -> int:
    return (max(X.vertices) + 1) if X.vertices else 0


def cone(X: SimplicialComplex) -> SimplicialComplex:
    return join(X, SimplicialComplex([[0]]))


def labeled(X: SimplicialComplex, labels: Sequence[Hashable]) -> SimplicialComplex:
    """X^S: vertex (v, s) gets id index(v) * |S| + index(s)."""
    S = list(dict.fromkeys(labels))
    if not S:
        raise MalformedInputError("label set must be nonempty")
    pos = {v: i for i, v in enumerate(X.vertices)}
    k = len(S)
    out = []
    for m in X.maximal:
        for choice in itertools.product(range(k), repeat=len(m)):
            out.append(tuple(pos[v] * k + c for v, c in zip(m, choice)))
    return SimplicialComplex(out)


def label_map(X: SimplicialComplex, labels: Sequence[Hashable]) -> dict[int, tuple[int, Hashable]]:
    S = list(dict.fromkeys(labels))
    return {i * len(S) + j: (v, s) for i, v in enumerate(X.vertices) for j, s in enumerate(S)}


# ---------------------------------------------------------------- semi-simplicial


class SemiSimplicialComplex:
    """Cells per dimension with face maps d_0..d_k; identities checked at construction.

    ``faces[k][c]`` is the tuple (d_0 c, ..., d_k c) for a k-cell c, k >= 1.
    ``names`` optionally records what each cell stands for (e.g. ordered tuples).
    """

    __slots__ = ("cells", "faces", "names")

    def __init__(self, cells: Mapping[int, Iterable[int]], faces: Mapping[int, Mapping[int, Sequence[int]]],
                 names: Mapping[tuple[int, int], Any] | None = None, budget: int | None = None):
        self.cells = {int(k): tuple(sorted(set(v))) for k, v in cells.items() if len(tuple(v))}
        if sum(len(v) for v in self.cells.values()) > face_budget(budget):
            raise BudgetError("semi-simplicial complex exceeds face budget")
        self.faces = {int(k): {int(c): tuple(f) for c, f in fm.items()} for k, fm in faces.items()}
        self.names = dict(names or {})
        self._validate()

    def _validate(self) -> None:
        dims = sorted(self.cells)
        if dims and dims != list(range(dims[-1] + 1)):
            raise MalformedInputError(f"cell dimensions must be 0..k, got {dims}")
        for k in dims:
            if k == 0:
                continue
            lower = set(self.cells[k - 1])
            fm = self.faces.get(k, {})
            for c in self.cells[k]:
                f = fm.get(c)
                if f is None or len(f) != k + 1:
                    raise MalformedInputError(f"cell {c} in dim {k} needs {k + 1} faces")
                if any(x not in lower for x in f):
                    raise MalformedInputError(f"cell {c} in dim {k} has a face outside dim {k - 1}")
        for k in dims:
            if k < 2:
                continue
            for c in self.cells[k]:
                for j in range(k + 1):
                    for i in range(j):
                        lhs = self.face(k - 1, self.face(k, c, j), i)
                        rhs = self.face(k - 1, self.face(k, c, i), j - 1)
                        if lhs != rhs:
                            raise MalformedInputError(
                                f"identity d_{i} d_{j} = d_{j - 1} d_{i} fails on cell {c} of dim {k}")

    def face(self, k: int, c: int, i: int) -> int:
        return self.faces[k][c][i]

    @property
    def dimension(self) -> int:
        return max(self.cells, default=-1)

    def num_cells(self, k: int) -> int:
        return len(self.cells.get(k, ()))

    def cell_vertices(self, k: int, c: int) -> tuple[int, ...]:
        if k == 0:
            return (c,)
        return self.cell_vertices(k - 1, self.face(k, c, k)) + (self.cell_vertices(k - 1, self.face(k, c, 0))[-1],)

    def is_empty(self) -> bool:
        return not self.cells

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.cells.items())

    def to_json(self) -> dict:
        return {
            "cells": {str(k): list(v) for k, v in sorted(self.cells.items())},
            "faces": {str(k): [[c, i, f] for c in sorted(fm) for i, f in enumerate(fm[c])]
                      for k, fm in sorted(self.faces.items()) if k in self.cells},
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SemiSimplicialComplex":
        try:
            cells = {int(k): [int(c) for c in v] for k, v in data["cells"].items()}
            faces: dict[int, dict[int, list[int]]] = {}
            for k, triples in data.get("faces", {}).items():
                k = int(k)
                fm: dict[int, dict[int, int]] = defaultdict(dict)
                for c, i, f in triples:
                    fm[int(c)][int(i)] = int(f)
                faces[k] = {c: [m[i] for i in range(k + 1)] for c, m in fm.items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad semi-simplicial JSON: {exc}") from exc
        return cls(cells, faces)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SemiSimplicialComplex)
                and self.cells == other.cells
                and {k: v for k, v in self.faces.items() if k in self.cells}
                == {k: v for k, v in other.faces.items() if k in other.cells})

    def __repr__(self) -> str:
        return f"SemiSimplicialComplex(cells={ {k: len(v) for k, v in self.cells.items()} })"


def as_semisimplicial(X: SimplicialComplex) -> SemiSimplicialComplex:
    """Each simplex becomes one cell; d_i deletes the i-th vertex in sorted order."""
    index: dict[Simplex, int] = {}
    cells: dict[int, list[int]] = defaultdict(list)
    names = {}
    for s in X.faces():
        k = len(s) - 1
        index[s] = len(cells[k])
        cells[k].append(index[s])
        names[(k, index[s])] = s
    faces = {k: {} for k in cells if k}
    for s, c in index.items():
        if len(s) > 1:
            faces[len(s) - 1][c] = tuple(index[s[:i] + s[i + 1:]] for i in range(len(s)))
    return SemiSimplicialComplex(cells, faces, names)


def ordered(X: SimplicialComplex, budget: int | None = None) -> SemiSimplicialComplex:
    """X^ord: one k-cell per ordering of each k-simplex; d_i deletes the i-th entry."""
    limit = face_budget(budget)
    total = 0
    per_dim: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for s in X.faces():
        total += _factorial(len(s))
        if total > limit:
            raise BudgetError(f"ordered complex exceeds face budget of {limit}")
        per_dim[len(s) - 1].extend(itertools.permutations(s))
    cells, faces, names = {}, {}, {}
    index: dict[tuple[int, ...], int] = {}
    for k, tuples in per_dim.items():
        tuples.sort()
        cells[k] = list(range(len(tuples)))
        for i, t in enumerate(tuples):
            index[t] = i
            names[(k, i)] = t
    for k, tuples in per_dim.items():
        if k:
            faces[k] = {index[t]: tuple(index[t[:i] + t[i + 1:]] for i in range(k + 1)) for t in tuples}
    return SemiSimplicialComplex(cells, faces, names, budget=limit)


def _factorial(m: int) -> int:
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def barycentric(K: SemiSimplicialComplex | SimplicialComplex, budget: int | None = None) -> SimplicialComplex:
    """Vertices are cells (numbered by (dim, id) order); simplices are chains of faces."""
    if isinstance(K, SimplicialComplex):
        K = as_semisimplicial(K)
    order = [(k, c) for k in sorted(K.cells) for c in K.cells[k]]
    vid = {cell: i for i, cell in enumerate(order)}
    for k, c in order:
        vs = K.cell_vertices(k, c)
        if len(set(vs)) != len(vs):
            raise UnsupportedInputError(f"cell {c} of dim {k} has repeated vertices {vs}")
    below: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for k, c in order:
        b = {(k, c)}
        if k:
            for f in K.faces[k][c]:
                b |= below[(k - 1, f)]
        below[(k, c)] = b
    # proper faces one dimension down drive the chain enumeration
    chains: list[tuple[int, ...]] = []
    limit = face_budget(budget)
    top = set(order)
    for k, c in order:
        if k:
            for f in K.faces[k][c]:
                top.discard((k - 1, f))

    def extend(chain: list[tuple[int, int]]) -> None:
        k, c = chain[-1]
        if k == 0:
            chains.append(tuple(vid[x] for x in chain))
            if len(chains) > limit:
                raise BudgetError("barycentric subdivision exceeds face budget")
            return
        for f in sorted(set(K.faces[k][c])):
            extend(chain + [(k - 1, f)])

    for cell in sorted(top):
        extend([cell])
    return SimplicialComplex(chains, budget)


# ---------------------------------------------------------------- posets and maps


@dataclass(frozen=True)
class Poset:
    elements: tuple
    leq: frozenset

    def __post_init__(self) -> None:
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "leq", frozenset(self.leq))
        eset = set(els)
        if len(eset) != len(els):
            raise MalformedInputError("poset elements must be distinct")
        for a, b in self.leq:
            if a not in eset or b not in eset:
                raise MalformedInputError(f"relation ({a!r}, {b!r}) mentions an unknown element")
        for a in els:
            if (a, a) not in self.leq:
                raise MalformedInputError(f"relation is not reflexive at {a!r}")
        up = defaultdict(set)
        for a, b in self.leq:
            if a != b:
                if (b, a) in self.leq:
                    raise MalformedInputError(f"relation is not antisymmetric at {a!r}, {b!r}")
                up[a].add(b)
        for a, bs in up.items():
            for b in bs:
                for c in up.get(b, ()):
                    if (a, c) not in self.leq:
                        raise MalformedInputError(f"relation is not transitive: {a!r} <= {b!r} <= {c!r}")

    @classmethod
    def from_relation(cls, elements: Iterable, pairs: Iterable[tuple]) -> "Poset":
        """Reflexive-transitive closure of the given pairs."""
        els = tuple(elements)
        up = {a: {a} for a in els}
        for a, b in pairs:
            up[a].add(b)
        changed = True
        while changed:
            changed = False
            for a in els:
                new = set().union(*(up[b] for b in up[a]))
                if new != up[a]:
                    up[a] = new
                    changed = True
        return cls(els, frozenset((a, b) for a in els for b in up[a]))

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq

    def restrict(self, keep: Iterable) -> "Poset":
        wanted = set(keep)
        ks = [e for e in self.elements if e in wanted]
        kset = set(ks)
        return Poset(tuple(ks), frozenset((a, b) for a, b in self.leq if a in kset and b in kset))


def face_poset(X: SimplicialComplex) -> Poset:
    faces = X.faces()
    pairs = {(a, b) for b in faces for a in _all_faces(b)}
    return Poset(tuple(faces), frozenset(pairs))


def order_complex(P: Poset, budget: int | None = None) -> SimplicialComplex:
    """Simplices are strict chains; element i of ``P.elements`` becomes vertex i."""
    idx = {e: i for i, e in enumerate(P.elements)}
    up: dict[Any, list] = {e: [] for e in P.elements}
    for a, b in P.leq:
        if a != b:
            up[a].append(b)
    # cover relation keeps maximal-chain enumeration small
    covers = {a: [b for b in bs if not any(P.lt(c, b) for c in bs if c != b)] for a, bs in up.items()}
    minimal = [e for e in P.elements if not any(P.lt(x, e) for x in P.elements)]
    chains: list[tuple[int, ...]] = []
    limit = face_budget(budget)

    def extend(chain: list) -> None:
        nxt = covers[chain[-1]]
        if not nxt:
            chains.append(tuple(idx[x] for x in chain))
            if len(chains) > limit:
                raise BudgetError("order complex exceeds face budget")
            return
        for b in nxt:
            extend(chain + [b])

    for m in minimal:
        extend([m])
    return SimplicialComplex(chains, budget)


@dataclass(frozen=True)
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Mapping[int, int]

    def __post_init__(self) -> None:
        vm = dict(self.vertex_map)
        object.__setattr__(self, "vertex_map", vm)
        missing = [v for v in self.source.vertices if v not in vm]
        if missing:
            raise MalformedInputError(f"vertex map misses source vertices {missing}")
        for m in self.source.maximal:
            if self.image(m) not in self.target:
                raise MalformedInputError(f"image of {list(m)} is not a simplex of the target")

    def image(self, s: Iterable[int]) -> Simplex:
        return tuple(sorted({self.vertex_map[v] for v in s}))


@dataclass(frozen=True)
class PosetMap:
    source: Poset
    target: Poset
    mapping: Mapping

    def __post_init__(self) -> None:
        m = dict(self.mapping)
        object.__setattr__(self, "mapping", m)
        tset = set(self.target.elements)
        for e in self.source.elements:
            if e not in m or m[e] not in tset:
                raise MalformedInputError(f"poset map undefined or off-target at {e!r}")
        for a, b in self.source.leq:
            if not self.target.le(m[a], m[b]):
                raise MalformedInputError(f"poset map is not order preserving on {a!r} <= {b!r}")

    def __call__(self, e):
        return self.mapping[e]


def simplex_poset_map(f: SimplicialMap) -> PosetMap:
    """The induced map of face posets, sigma -> f(sigma)."""
    P, Q = face_poset(f.source), face_poset(f.target)
    return PosetMap(P, Q, {s: f.image(s) for s in P.elements})
