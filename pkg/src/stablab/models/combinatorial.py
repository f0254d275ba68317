"""Small combinatorial models: the quotient simplex, polygon arc complexes,
join/wedge models and truncated chain complexes in genus one and two."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from ..complexes import SemiSimplicialComplex, SimplicialComplex, flag_complex, join
from ..errors import MalformedInputError


def quotient_simplex_mod_order(n: int) -> SemiSimplicialComplex:
    """The (n-1)-simplex with all k-faces identified, order preserved: one cell per dimension."""
    if n < 1:
        raise MalformedInputError(f"n must be >= 1, got {n}")
    cells = {k: [0] for k in range(n)}
    faces = {k: {0: (0,) * (k + 1)} for k in range(1, n)}
    return SemiSimplicialComplex(cells, faces)


# ---------------------------------------------------------------- polygons


def polygon_diagonals(m: int) -> list[tuple[int, int]]:
    if m < 4:
        raise MalformedInputError(f"a polygon needs m >= 4 sides for diagonals, got {m}")
    return [(i, j) for i in range(m) for j in range(i + 2, m) if (i, j) != (0, m - 1)]


def diagonals_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    (p, q), (r, s) = sorted(a), sorted(b)
    return p < r < q < s or r < p < s < q


def polygon_arc_complex(m: int) -> SimplicialComplex:
    """Vertex i is ``polygon_diagonals(m)[i]``; simplices are noncrossing sets."""
    diags = polygon_diagonals(m)
    edges = [(i, j) for (i, a), (j, b) in itertools.combinations(enumerate(diags), 2) if not diagonals_cross(a, b)]
    return flag_complex(range(len(diags)), edges)


def polygon_surgery_flow(m: int, target: tuple[int, int] = (0, 2), toward: int = 2):
    """Naive surgery toward a fixed diagonal: cut a crossing diagonal and slide both ends to ``toward``.

    Surgery in a disk can produce polygon sides, which are not vertices, so
    the rule may return no simplex at all.
    """
    from ..toolbox import ComplexityFunction, FlowRule

    diags = polygon_diagonals(m)
    index = {d: i for i, d in enumerate(diags)}
    if target not in index or toward not in target:
        raise MalformedInputError("target must be a diagonal and toward one of its ends")

    def cdist(x: int) -> int:
        return min((x - toward) % m, (toward - x) % m)

    def delta(v: int):
        p, q = diags[v]
        out = {tuple(sorted((e, toward))) for e in (p, q) if e != toward}
        out = [index[d] for d in out if d in index]
        return tuple(sorted(out)) or None

    def pick(s) -> int:
        crossing = [v for v in s if diagonals_cross(diags[v], target)]
        return min(crossing, key=lambda v: (cdist(diags[v][0]) + cdist(diags[v][1]), v))

    def cost(v: int) -> int:
        return int(diagonals_cross(diags[v], target))

    return FlowRule(delta=delta, pick=pick, name="naive polygon surgery"), ComplexityFunction(cost), index[target]


# ---------------------------------------------------------------- joins of discrete sets


def wedge_join_model(g: int, k: int) -> SimplicialComplex:
    """Join of g copies of a k-point set; vertex j of copy i is i*k + j."""
    if g < 1 or k < 1:
        raise MalformedInputError("g and k must be positive")
    return SimplicialComplex(tuple(i * k + c for i, c in enumerate(choice))
                             for choice in itertools.product(range(k), repeat=g))


# ---------------------------------------------------------------- chains


def _primitive(v: tuple[int, int]) -> bool:
    return math.gcd(abs(v[0]), abs(v[1])) == 1


def _normalize(v: tuple[int, int]) -> tuple[int, int]:
    return v if (v[0] > 0 or (v[0] == 0 and v[1] > 0)) else (-v[0], -v[1])


@dataclass(frozen=True, order=True)
class ChainVertex:
    a: tuple[int, int]
    b: tuple[int, int]
    orientation: int

    def __post_init__(self) -> None:
        if not (_primitive(self.a) and _primitive(self.b)):
            raise MalformedInputError("chain curves must be primitive vectors")
        if _normalize(self.a) != self.a or _normalize(self.b) != self.b:
            raise MalformedInputError("chain curves must be sign-normalized")
        if abs(self.a[0] * self.b[1] - self.a[1] * self.b[0]) != 1:
            raise MalformedInputError("chain curves must meet exactly once")
        if self.orientation not in (1, -1):
            raise MalformedInputError("orientation is +1 or -1")

    def to_json(self) -> list:
        return [list(self.a), list(self.b), self.orientation]


def genus_one_chains(bound: int) -> list[ChainVertex]:
    if bound < 1:
        raise MalformedInputError("bound must be >= 1")
    rng = range(-bound, bound + 1)
    vecs = sorted({_normalize((p, q)) for p in rng for q in rng if (p, q) != (0, 0) and _primitive((p, q))})
    out = [ChainVertex(a, b, o) for a in vecs for b in vecs for o in (1, -1)
           if abs(a[0] * b[1] - a[1] * b[0]) == 1]
    return sorted(out, key=lambda c: (max(map(abs, c.a + c.b)), c))


@dataclass(frozen=True)
class ChainModel:
    genus: int
    parts: tuple[tuple[ChainVertex, ...], ...]
    complex: SimplicialComplex

    @property
    def part_sizes(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)


def chain_truncation(genus: int, bound: int, limit: Optional[Union[int, Sequence[int]]] = None) -> ChainModel:
    """Genus 1: discrete set of chains with coordinates <= bound. Genus 2: the join of two such sets.

    ``limit`` keeps only the first few chains of each part (ordered by size
    then lexicographically), one cap per part or a shared cap.
    """
    if genus not in (1, 2):
        raise MalformedInputError("only genus 1 and 2 are modeled")
    base = genus_one_chains(bound)
    caps = [limit] * genus if limit is None or isinstance(limit, int) else list(limit)
    if len(caps) != genus:
        raise MalformedInputError("one cap per part is needed")
    parts = tuple(tuple(base[:c] if c is not None else base) for c in caps)
    disc = [SimplicialComplex([i] for i in range(len(p))) for p in parts]
    X = disc[0] if genus == 1 else join(disc[0], disc[1])
    return ChainModel(genus, parts, X)
