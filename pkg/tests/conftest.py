"""Shared generators and independent oracles for the test suite."""
from __future__ import annotations

import itertools
from pathlib import Path

import pytest

from smposet import Dag, Instance, Matching, blocking_pairs, transitive_closure

DATA = Path(__file__).parent / "data"


def data_text(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def random_complete_instance(rng, n: int) -> Instance:
    men = [rng.sample(range(n), n) for _ in range(n)]
    women = [rng.sample(range(n), n) for _ in range(n)]
    return Instance(men, women)


def random_incomplete_instance(rng, n_men: int, n_women: int, edge_prob: float = 0.6) -> Instance:
    """Consistent instance over a random acceptability graph."""
    acceptable = [
        (m, w)
        for m in range(n_men)
        for w in range(n_women)
        if rng.random() < edge_prob
    ]
    men = [[] for _ in range(n_men)]
    women = [[] for _ in range(n_women)]
    for m, w in acceptable:
        men[m].append(w)
        women[w].append(m)
    for lst in men + women:
        rng.shuffle(lst)
    return Instance(men, women)


def stable_matchings_by_matching_scan(inst: Instance) -> list[Matching]:
    """Oracle for incomplete lists: enumerate every matching in the
    acceptability graph and filter by the blocking-pair predicate.
    """
    out = []

    def extend(m: int, used: set[int], pairs: list[tuple[int, int]]):
        if m == inst.n_men:
            mu = Matching(pairs)
            if not blocking_pairs(inst, mu):
                out.append(mu)
            return
        extend(m + 1, used, pairs)
        for w in inst.men_prefs[m]:
            if w not in used:
                extend(m + 1, used | {w}, pairs + [(m, w)])

    extend(0, set(), [])
    return sorted(out, key=lambda m: m.sorted_pairs())


def random_dag(rng, p: int, edge_prob: float = 0.35) -> Dag:
    edges = [
        (u, v)
        for u in range(1, p + 1)
        for v in range(u + 1, p + 1)
        if rng.random() < edge_prob
    ]
    return Dag(p, edges)


def stable_matchings_by_permutation_scan(inst: Instance) -> list[Matching]:
    """Oracle independent of the rotation machinery: filter every perfect
    matching by the blocking-pair predicate. Complete square instances only.
    """
    assert inst.is_complete and inst.n_men == inst.n_women
    out = []
    for perm in itertools.permutations(range(inst.n_women)):
        mu = Matching(enumerate(perm))
        if not blocking_pairs(inst, mu):
            out.append(mu)
    return sorted(out, key=lambda m: m.sorted_pairs())


def downsets_by_subset_scan(g: Dag) -> list[frozenset[int]]:
    """Oracle independent of the lattice DFS: test all 2^p subsets against
    the closure-based downset predicate.
    """
    closure = transitive_closure(g)
    verts = list(g.vertices())
    out = []
    for bits in range(1 << g.p):
        z = frozenset(v for i, v in enumerate(verts) if bits >> i & 1)
        if all(u in z for u, v in closure.edges if v in z):
            out.append(z)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _canonical_poset_key(p: int, edges: frozenset[tuple[int, int]]) -> tuple:
    best = None
    verts = list(range(1, p + 1))
    for perm in itertools.permutations(verts):
        relabel = {v: perm[i] for i, v in enumerate(verts)}
        key = tuple(sorted((relabel[u], relabel[v]) for u, v in edges))
        if best is None or key < best:
            best = key
    return (p, best)


def posets_upto_isomorphism(p: int) -> list[Dag]:
    """All posets on p elements up to isomorphism, as Hasse diagrams.

    Candidates are the transitively closed edge sets over pairs (u, v) with
    u < v; every isomorphism class has such a representative.
    """
    pairs = [(u, v) for u in range(1, p + 1) for v in range(u + 1, p + 1)]
    seen = set()
    out = []
    for bits in range(1 << len(pairs)):
        edges = frozenset(e for i, e in enumerate(pairs) if bits >> i & 1)
        closed = all(
            ((a, d) in edges)
            for a, b in edges
            for c, d in edges
            if b == c
        )
        if not closed:
            continue
        key = _canonical_poset_key(p, edges)
        if key in seen:
            continue
        seen.add(key)
        from smposet import transitive_reduction

        out.append(transitive_reduction(Dag(p, edges)))
    return out


@pytest.fixture(scope="session")
def example_instance():
    from smposet import parse_instance

    return parse_instance(data_text("example_rotation_poset.sm"))
