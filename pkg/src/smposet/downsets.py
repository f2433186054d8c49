"""Counting downsets of a DAG over a nice path decomposition, and exact
uniform sampling of downsets via self-reducibility.

Counts are plain Python ints, so they are exact at any size.
"""
from __future__ import annotations

import random
from typing import Iterable

from .errors import CapExceededError, ValidationError
from .pathdecomp import PathDecomposition, induced_decomposition, validate_decomposition
from .posets import Dag

HARD_WIDTH_CAP = 30


def _steps(bags: tuple[frozenset[int], ...]):
    """Yield (vertex, inserted?) per bag of a structurally nice sequence."""
    prev: frozenset[int] = frozenset()
    for bag in bags:
        delta = bag ^ prev
        if len(delta) != 1:
            raise ValidationError("decomposition is not nice")
        v = next(iter(delta))
        yield v, bag > prev
        prev = bag
    if prev:
        raise ValidationError("nice decomposition must end with an empty bag")


def _count_over_bags(
    bags: tuple[frozenset[int], ...],
    in_adj: dict[int, tuple[int, ...]],
    out_adj: dict[int, tuple[int, ...]],
    max_width: int,
) -> int:
    """The table update loop. C maps a bitmask over bag slots to the number of
    downsets of the seen subgraph that intersect the bag exactly there.
    """
    table: dict[int, int] = {0: 1}
    slot: dict[int, int] = {}
    free: list[int] = []
    seen: set[int] = set()
    for v, inserted in _steps(bags):
        if inserted:
            if len(slot) >= max_width + 1:
                raise CapExceededError(
                    f"bag size {len(slot) + 1} exceeds width cap {max_width}"
                )
            s = free.pop() if free else len(slot)
            slot[v] = s
            vbit = 1 << s
            umask = 0
            for u in in_adj.get(v, ()):
                if u in seen:
                    if u not in slot:
                        raise ValidationError(
                            "invalid decomposition: seen in-neighbor outside bag"
                        )
                    umask |= 1 << slot[u]
            wmask = 0
            for w in out_adj.get(v, ()):
                if w in seen:
                    if w not in slot:
                        raise ValidationError(
                            "invalid decomposition: seen out-neighbor outside bag"
                        )
                    wmask |= 1 << slot[w]
            seen.add(v)
            new: dict[int, int] = {}
            for a, c in table.items():
                if not a & wmask:
                    new[a] = c
                if a & umask == umask:
                    new[a | vbit] = new.get(a | vbit, 0) + c
            table = new
        else:
            s = slot.pop(v)
            free.append(s)
            vbit = 1 << s
            new = {}
            for a, c in table.items():
                key = a & ~vbit
                new[key] = new.get(key, 0) + c
            table = new
    return sum(table.values())


def count_downsets(g: Dag, x: PathDecomposition, max_width: int = HARD_WIDTH_CAP) -> int:
    """Number of downsets of g, computed over a valid nice path decomposition
    in time O(2^w w n) for width w.
    """
    if not x.is_nice:
        raise ValidationError("decomposition is not nice")
    if not validate_decomposition(g, x):
        raise ValidationError("decomposition is not valid for this graph")
    return _count_over_bags(x.bags, g.in_adj, g.out_adj, max_width)


def descendants(g: Dag, v: int) -> set[int]:
    """v together with everything reachable from it."""
    if not 1 <= v <= g.p:
        raise ValidationError(f"vertex {v} out of range")
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.out_adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def uniform_int(rng: random.Random, n: int) -> int:
    """Uniform draw from 1..n by rejection sampling on the bit length of n;
    exact for arbitrary-precision n with expected fewer than two rejections.
    """
    if n <= 0:
        raise ValidationError("uniform_int needs a positive bound")
    bits = n.bit_length()
    while True:
        x = rng.getrandbits(bits)
        if x < n:
            return x + 1


def sample_downset(
    g: Dag,
    x: PathDecomposition,
    rng: random.Random,
    max_width: int = HARD_WIDTH_CAP,
) -> frozenset[int]:
    """One downset of g drawn exactly uniformly among all downsets.

    Walks a topological order, keeping vertex v with probability proportional
    to the number of downsets that contain it, and pruning v's descendants
    otherwise. Each downset count is delegated to the pathwidth DP on the
    decomposition induced by the surviving vertices.
    """
    if not x.is_nice:
        raise ValidationError("decomposition is not nice")
    if not validate_decomposition(g, x):
        raise ValidationError("decomposition is not valid for this graph")
    alive = set(g.vertices())
    chosen: set[int] = set()

    def down(keep: set[int]) -> int:
        bags = induced_decomposition(x, keep).bags
        return _count_over_bags(bags, g.in_adj, g.out_adj, max_width)

    for v in g.topological_order():
        if v not in alive:
            continue
        with_v = alive - {v}
        without_v = alive - _descendants_within(g, v, alive)
        a1 = down(with_v)
        a0 = down(without_v)
        r = uniform_int(rng, a1 + a0)
        if r <= a1:
            chosen.add(v)
            alive = with_v
        else:
            alive = without_v
    return frozenset(chosen)


def _descendants_within(g: Dag, v: int, alive: set[int]) -> set[int]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.out_adj[u]:
            if w in alive and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def count_downsets_within(
    g: Dag,
    x: PathDecomposition,
    keep: Iterable[int],
    max_width: int = HARD_WIDTH_CAP,
) -> int:
    """Downset count of the subgraph induced by keep, reusing a decomposition
    of the full graph. Callers must pass a decomposition valid for g.
    """
    ks = set(keep)
    bags = induced_decomposition(x, ks).bags
    return _count_over_bags(bags, g.in_adj, g.out_adj, max_width)
