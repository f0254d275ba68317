"""Truncated tether complexes and the surgery flow toward a fixed tether."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from ..complexes import SimplicialComplex, flag_complex
from ..errors import BudgetError, MalformedInputError
from .disk import (
    PuncturedDisk,
    Tether,
    act_tether,
    base_tether,
    nearest_crossing,
    spider_complexity,
    surger_tether,
    tether_intersection,
)

MAX_ORBIT = 200_000


def straight_tethers(disk: PuncturedDisk) -> list[Tether]:
    """The spider from b_1 plus, for every other boundary point, the arcs staying in the root tile."""
    out = [base_tether(k) for k in range(1, disk.n + 1)]
    out += [Tether(j, (), i) for j in range(2, disk.d + 1) for i in range(1, disk.n + 1)]
    return out


def tether_orbit(disk: PuncturedDisk, words: int) -> set[Tether]:
    """All images of straight tethers under braid words of length <= ``words``."""
    seen = set(straight_tethers(disk))
    frontier = sorted(seen)
    for _ in range(words):
        nxt = []
        for t in frontier:
            for g in range(1, disk.n):
                for gen in (g, -g):
                    u = act_tether(gen, t, disk)
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
        if len(seen) > MAX_ORBIT:
            raise BudgetError(f"tether orbit exceeds {MAX_ORBIT} classes")
        frontier = nxt
    return seen


def _order_key(disk: PuncturedDisk):
    return lambda t: (spider_complexity(t, disk), t.start, len(t.word), t.word, t.end)


@dataclass(frozen=True)
class TetherComplex:
    disk: PuncturedDisk
    tethers: tuple[Tether, ...]
    complex: SimplicialComplex
    bound: int
    words: int
    coconnected: bool

    def vertex(self, t: Tether) -> int:
        return self.tethers.index(t)

    def simplex_tethers(self, s: Iterable[int]) -> list[Tether]:
        return [self.tethers[v] for v in s]

    @property
    def budgets(self) -> dict:
        return {"bound": self.bound, "words": self.words}


def tether_complex(disk: PuncturedDisk, bound: int, coconnected: bool = False, words: int = 4,
                   budget: int | None = None) -> TetherComplex:
    """Flag complex on pairwise disjoint tether classes of spider complexity <= bound.

    In a disk, pairwise disjoint arc classes are realized disjointly all at
    once (their lifts are pairwise unlinked chords), so the clique complex is
    exactly the complex of disjointly realizable systems.
    """
    if bound < 0 or words < 0:
        raise MalformedInputError("budgets must be nonnegative")
    verts = sorted((t for t in tether_orbit(disk, words) if spider_complexity(t, disk) <= bound),
                   key=_order_key(disk))
    edges = []
    for (i, a), (j, b) in itertools.combinations(enumerate(verts), 2):
        if coconnected and a.end == b.end:
            continue
        if tether_intersection(a, b, disk) == 0:
            edges.append((i, j))
    X = flag_complex(range(len(verts)), edges, budget)
    return TetherComplex(disk, tuple(verts), X, bound, words, coconnected)


def surgery_flow(T: TetherComplex, target: Tether):
    """Flow rule and complexity function pushing T onto the star of ``target``."""
    from ..toolbox import ComplexityFunction, FlowRule

    disk = T.disk
    index = {t: i for i, t in enumerate(T.tethers)}
    t_id = index[target]

    def cost(v: int) -> int:
        return tether_intersection(T.tethers[v], target, disk)

    def pick(s) -> int:
        found = nearest_crossing(target, T.simplex_tethers(s), disk)
        return index[found]

    def delta(v: int):
        new = surger_tether(target, T.tethers[v], disk)
        if new not in index:
            return None
        return (index[new],)

    return FlowRule(delta=delta, pick=pick, name=f"surgery toward vertex {t_id}"), \
        ComplexityFunction(cost)


def doubled_tether_rule(T: TetherComplex):
    """Bad simplices: every puncture that carries a tether carries at least two."""
    from ..toolbox import BadSimplexRule

    def bad(s) -> bool:
        ends = [T.tethers[v].end for v in s]
        return all(ends.count(e) >= 2 for e in ends)

    return BadSimplexRule("each tethered puncture has at least two tethers", bad)
