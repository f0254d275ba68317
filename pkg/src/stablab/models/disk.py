"""Tethers in a punctured disk, encoded through the universal cover.

The disk D carries punctures p_1..p_n and boundary points b_1..b_d. The
straight spider (arcs from b_1 to every puncture) cuts D into a single
polygonal tile; its lifts tile the universal cover, indexed by the free
group F_n = <x_1..x_n>. Crossing the left side of spider leg k from tile g
leads to tile g*x_k.

A tether class is stored as ``(start, word, end)``: the arc leaves b_start
from the root tile, ends at puncture p_end inside tile ``word``. Words are
tuples of signed generator indices, freely reduced and with trailing powers
of x_end stripped (those only spin the arc around its own endpoint).

Geometric intersection is computed by counting deck translates of one lift
whose endpoints interleave with a fixed lift of the other on the boundary
circle of the cover.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..errors import MalformedInputError, PreconditionError

Word = tuple[int, ...]


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def prefix_word(k: int) -> Word:
    """x_1 x_2 ... x_k."""
    return tuple(range(1, k + 1))


def _strip(word: Word, k: int) -> Word:
    end = len(word)
    while end and abs(word[end - 1]) == k:
        end -= 1
    return word[:end]


@dataclass(frozen=True, order=True)
class Tether:
    start: int
    word: Word
    end: int

    @staticmethod
    def make(start: int, word: Iterable[int], end: int) -> "Tether":
        return Tether(start, _strip(free_reduce(word), end), end)

    def to_json(self) -> list:
        return [self.start, list(self.word), self.end]


@dataclass(frozen=True)
class PuncturedDisk:
    n: int
    d: int = 1

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1:
            raise MalformedInputError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")

    @property
    def tile_size(self) -> int:
        return 4 * self.n + self.d

    @property
    def base_triangulation(self) -> dict:
        # Cell structure used in place of a triangulation: the spider legs plus
        # the boundary arcs, cutting D into one tile.
        return {
            "legs": [[1, k] for k in range(1, self.n + 1)],
            "boundary_points": list(range(1, self.d + 1)),
            "tile_boundary": self.tile_boundary(),
        }

    def tile_boundary(self) -> list[str]:
        labels = ["s0"]
        for k in range(1, self.n + 1):
            labels += [f"L{k}", f"p{k}", f"R{k}", f"s{k}"]
        labels += [f"b{j}" for j in range(2, self.d + 1)]
        return labels

    def check(self, t: Tether) -> None:
        if not (1 <= t.start <= self.d and 1 <= t.end <= self.n):
            raise MalformedInputError(f"tether {t} does not live in {self}")
        if any(x == 0 or abs(x) > self.n for x in t.word):
            raise MalformedInputError(f"tether {t} uses a letter outside F_{self.n}")
        if Tether.make(t.start, t.word, t.end) != t:
            raise MalformedInputError(f"tether {t} is not in reduced form")


# ---------------------------------------------------------------- cover geometry

def _exit_pos(letter: int) -> int:
    k = abs(letter)
    return 4 * k - 3 if letter > 0 else 4 * k - 1


def _entry_pos(letter: int) -> int:
    k = abs(letter)
    return 4 * k - 1 if letter > 0 else 4 * k - 3


@functools.lru_cache(maxsize=1 << 18)
def _key(tile: Word, pos: int, size: int) -> tuple[int, ...]:
    """Position of a boundary point of the cover in a linear order of the circle."""
    if not tile:
        return (pos,)
    out = [_exit_pos(tile[0])]
    for prev, nxt in zip(tile, tile[1:]):
        out.append((_exit_pos(nxt) - _entry_pos(prev)) % size)
    out.append((pos - _entry_pos(tile[-1])) % size)
    return tuple(out)


def _puncture_key(g: Word, k: int, size: int) -> tuple[int, ...]:
    return _key(_strip(g, k), 4 * k - 2, size)


@functools.lru_cache(maxsize=1 << 16)
def _corner_key(g: Word, n: int, size: int) -> tuple[int, ...]:
    # the lift of b_1 at corner s_0 of tile g is corner s_m of tile g*x_1..x_m;
    # the tile nearest the root gives a key compatible with the others
    best = None
    for m in range(n + 1):
        tile = free_reduce(g + prefix_word(m))
        if best is None or len(tile) < len(best[0]):
            best = (tile, 4 * m)
    return _key(best[0], best[1], size)


def _start_key(h: Word, start: int, disk: PuncturedDisk) -> tuple[int, ...]:
    size = disk.tile_size
    if start == 1:
        return _corner_key(h, disk.n, size)
    return _key(h, 4 * disk.n + start - 1, size)


def _lift(t: Tether, h: Word, disk: PuncturedDisk) -> tuple[tuple, tuple]:
    return (_start_key(h, t.start, disk),
            _puncture_key(free_reduce(h + t.word), t.end, disk.tile_size))


def _between(x: tuple, a: tuple, b: tuple) -> bool:
    lo, hi = (a, b) if a < b else (b, a)
    return lo < x < hi


def _linked(c1: tuple, c2: tuple) -> bool:
    (a, b), (x, y) = c1, c2
    if len({a, b, x, y}) < 4:
        return False
    return _between(x, a, b) != _between(y, a, b)


def _candidate_translates(a: Tether, b: Tether) -> set[Word]:
    pa = [a.word[:i] for i in range(len(a.word) + 1)]
    pb = [inverse(b.word[:i]) for i in range(len(b.word) + 1)]
    return {free_reduce(p + q) for p in pa for q in pb}


@functools.lru_cache(maxsize=1 << 18)
def _linked_translates(a: Tether, b: Tether, disk: PuncturedDisk) -> list[tuple[Word, tuple]]:
    base = _lift(a, (), disk)
    out = []
    for h in sorted(_candidate_translates(a, b), key=lambda w: (len(w), w)):
        chord = _lift(b, h, disk)
        if _linked(base, chord):
            out.append((h, chord))
    return out


@functools.lru_cache(maxsize=1 << 20)
def _pair_intersection(a: Tether, b: Tether, n: int, d: int) -> int:
    if a == b:
        return 0
    return len(_linked_translates(a, b, PuncturedDisk(n, d)))


def tether_intersection(a: Tether, b: Tether, disk: PuncturedDisk) -> int:
    if b < a:
        a, b = b, a
    return _pair_intersection(a, b, disk.n, disk.d)


def self_intersection(t: Tether, disk: PuncturedDisk) -> int:
    """Number of self crossings of the tightened arc; zero iff the class is simple."""
    return len(_linked_translates(t, t, disk))


# ---------------------------------------------------------------- braid action

@functools.lru_cache(maxsize=None)
def _braid_data(n: int, gen: int) -> tuple[dict, dict, dict]:
    """Automorphism of F_n, puncture permutation and images of the base legs."""
    k = abs(gen)
    if not 1 <= k <= n - 1:
        raise MalformedInputError(f"generator {gen} out of range for n={n}")
    aut: dict[int, Word] = {}
    if gen > 0:
        aut[k] = (k, k + 1, -k)
        aut[k + 1] = (k,)
        legs = {k: prefix_word(k), k + 1: prefix_word(k + 1)}
    else:
        aut[k] = (k + 1,)
        aut[k + 1] = (-(k + 1), k, k + 1)
        legs = {k: prefix_word(k - 1), k + 1: prefix_word(k - 1)}
    perm = {i: i for i in range(1, n + 1)}
    perm[k], perm[k + 1] = k + 1, k
    return aut, perm, legs


def _apply_aut(word: Word, aut: dict) -> Word:
    out: list[int] = []
    for x in word:
        img = aut.get(abs(x), (abs(x),))
        out.extend(img if x > 0 else inverse(img))
    return free_reduce(out)


@functools.lru_cache(maxsize=1 << 20)
def _act(gen: int, t: Tether, n: int) -> Tether:
    aut, perm, legs = _braid_data(n, gen)
    i = t.end
    leg_word = legs.get(i, prefix_word(i - 1))
    w = _apply_aut(t.word, aut) + inverse(_apply_aut(prefix_word(i - 1), aut)) + leg_word
    return Tether.make(t.start, w, perm[i])


def act_tether(gen: int, t: Tether, disk: PuncturedDisk) -> Tether:
    """Image of a tether under the half twist sigma_|gen| (inverse when gen < 0)."""
    return _act(gen, t, disk.n)


def act_word(braid: Iterable[int], t: Tether, disk: PuncturedDisk) -> Tether:
    """Apply generators left to right."""
    for g in braid:
        t = act_tether(g, t, disk)
    return t


def base_tether(k: int) -> Tether:
    return Tether(1, prefix_word(k - 1), k)


# ---------------------------------------------------------------- arc systems

@dataclass(frozen=True)
class NormalArcSystem:
    """A finite set of tether classes in a fixed punctured disk."""

    disk: PuncturedDisk
    components: tuple[Tether, ...]
    coords: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        comps = tuple(sorted(set(self.components)))
        for t in comps:
            self.disk.check(t)
        object.__setattr__(self, "components", comps)
        spider = [base_tether(k) for k in range(1, self.disk.n + 1)]
        coords = tuple(sum(tether_intersection(t, s, self.disk) for t in comps) for s in spider)
        object.__setattr__(self, "coords", coords)

    @property
    def component_labels(self) -> tuple[tuple[int, int], ...]:
        return tuple((t.start, t.end) for t in self.components)

    def is_coconnected(self) -> bool:
        ends = [t.end for t in self.components]
        return len(ends) == len(set(ends))

    def single(self) -> Tether:
        if len(self.components) != 1:
            raise PreconditionError("expected a single tether")
        return self.components[0]

    def to_json(self) -> dict:
        return {"n": self.disk.n, "d": self.disk.d,
                "components": [t.to_json() for t in self.components],
                "coords": list(self.coords)}


def system(disk: PuncturedDisk, tethers: Iterable[Tether]) -> NormalArcSystem:
    return NormalArcSystem(disk, tuple(tethers))


def base_tethers(disk: PuncturedDisk) -> NormalArcSystem:
    return system(disk, (base_tether(k) for k in range(1, disk.n + 1)))


def braid_act(generator: int, s: NormalArcSystem) -> NormalArcSystem:
    return system(s.disk, (act_tether(generator, t, s.disk) for t in s.components))


def intersection_number(s1: NormalArcSystem, s2: NormalArcSystem) -> int:
    if s1.disk != s2.disk:
        raise MalformedInputError("systems live in different disks")
    return sum(tether_intersection(a, b, s1.disk) for a in s1.components for b in s2.components)


def spider_complexity(t: Tether, disk: PuncturedDisk) -> int:
    return sum(tether_intersection(t, base_tether(k), disk) for k in range(1, disk.n + 1))


# ---------------------------------------------------------------- surgery

def _nearest(t: Tether, chords: list[tuple[object, tuple]], disk: PuncturedDisk):
    a0 = _lift(t, (), disk)[0]

    def separates(c: tuple, other: tuple) -> bool:
        # chords of tethers from the same boundary point may share that endpoint
        probe = other[1] if other[0] in c else other[0]
        return _between(a0, *c) != _between(probe, *c)

    for tag, chord in chords:
        if not any(separates(c2, chord) for tag2, c2 in chords if tag2 != tag):
            return tag
    raise AssertionError("crossing chords are not nested")  # pragma: no cover


def nearest_crossing(t: Tether, others: Iterable[Tether], disk: PuncturedDisk) -> Tether | None:
    """Among pairwise disjoint tethers, the one whose crossing with t comes first from t's boundary end."""
    chords = [((s, h), chord) for s in others if s != t for h, chord in _linked_translates(t, s, disk)]
    if not chords:
        return None
    return _nearest(t, chords, disk)[0]


def surger_tether(t: Tether, s: Tether, disk: PuncturedDisk) -> Tether:
    """Cut s at its crossing with t nearest t's boundary end; keep the puncture side."""
    crossings = _linked_translates(t, s, disk) if t != s else []
    if not crossings:
        raise PreconditionError("surgery needs tethers that intersect")
    h = _nearest(t, crossings, disk)
    return Tether.make(t.start, h + s.word, s.end)


def surger(t: NormalArcSystem, s: NormalArcSystem) -> NormalArcSystem:
    if t.disk != s.disk:
        raise MalformedInputError("systems live in different disks")
    return system(s.disk, [surger_tether(t.single(), s.single(), s.disk)])
