import random

import pytest

from smposet import (
    CapExceededError,
    Dag,
    Extent,
    PathDecomposition,
    ValidationError,
    compute_range,
    construct_path_decomposition,
    extent_of,
    format_decomposition,
    induced_decomposition,
    parse_decomposition,
    pathwidth_exact_tiny,
    rotation_digraph,
    to_nice,
    validate_decomposition,
)
from smposet.instance import Instance

from conftest import data_text, random_complete_instance, random_dag

DIAMOND = Dag(4, [(1, 2), (1, 3), (2, 4), (3, 4)])
DIAMOND_X = PathDecomposition.of(
    [{1}, {1, 2}, {1, 2, 3}, {2, 3}, {2, 3, 4}, {3, 4}, {4}, set()]
)


def test_printed_decomposition_is_valid():
    assert validate_decomposition(DIAMOND, DIAMOND_X)
    assert DIAMOND_X.width == 2
    assert DIAMOND_X.is_nice


def test_single_bag_is_valid():
    x = PathDecomposition.of([{1, 2, 3, 4}])
    assert validate_decomposition(DIAMOND, x)
    assert x.width == 3


def test_dropping_a_bag_breaks_edge_coverage():
    bags = [b for b in DIAMOND_X.bags if b != frozenset({1, 2, 3})]
    assert not validate_decomposition(DIAMOND, PathDecomposition(tuple(bags)))


def test_convexity_violation_detected():
    x = PathDecomposition.of([{1}, {2}, {1, 2}])
    assert not validate_decomposition(Dag(2, [(1, 2)]), x)


def test_parse_format_round_trip():
    x = parse_decomposition(data_text("diamond.pd"))
    assert x == DIAMOND_X
    assert parse_decomposition(format_decomposition(x)) == x


def test_parse_empty_decomposition():
    assert parse_decomposition(data_text("empty.pd")) == PathDecomposition(())


def test_to_nice_on_printed_decomposition():
    nice = to_nice(DIAMOND, DIAMOND_X)
    assert nice == DIAMOND_X  # already nice, width 2, length 8
    assert len(nice) == 8


def test_to_nice_single_bag():
    g = Dag(3, [(1, 2)])
    nice = to_nice(g, PathDecomposition.of([{1, 2, 3}]))
    assert nice.is_nice and len(nice) == 6 and nice.width == 2
    assert validate_decomposition(g, nice)


def test_to_nice_random_preserves_width_and_validity():
    rng = random.Random(83)
    for _ in range(20):
        g = random_dag(rng, rng.randint(1, 8))
        _w, x = pathwidth_exact_tiny(g)
        # fatten bags randomly while keeping validity, then re-nice
        nice = to_nice(g, x)
        assert nice.is_nice
        assert len(nice) == 2 * g.p
        assert validate_decomposition(g, nice)
        assert nice.width == x.width


def test_to_nice_rejects_invalid():
    with pytest.raises(ValidationError):
        to_nice(Dag(2, [(1, 2)]), PathDecomposition.of([{1}, {2}]))


def test_induced_decomposition_full_and_empty():
    nice = to_nice(DIAMOND, DIAMOND_X)
    assert induced_decomposition(nice, {1, 2, 3, 4}) == nice
    assert induced_decomposition(nice, set()) == PathDecomposition(())


def test_induced_decomposition_random():
    rng = random.Random(89)
    for _ in range(20):
        g = random_dag(rng, 8)
        _w, x = pathwidth_exact_tiny(g)
        keep = {v for v in g.vertices() if rng.random() < 0.6}
        sub = Dag(g.p, {(u, v) for u, v in g.edges if u in keep and v in keep})
        ind = induced_decomposition(to_nice(g, x), keep)
        assert ind.is_nice
        bags_union = set().union(*ind.bags) if ind.bags else set()
        assert bags_union == keep
        for u, v in sub.edges:
            if u in keep and v in keep:
                assert any(u in b and v in b for b in ind.bags)


def test_extent_degenerate_k1():
    from smposet import Rotation, RangeProfile

    rho = Rotation(0, ((0, 0), (1, 1)))
    profile = RangeProfile(1, (5, 5), (5, 5), (5, 5), (5, 5))
    assert extent_of(rho, profile) == Extent(4, 6)


def test_extent_example_rho1(example_instance):
    profile = compute_range(example_instance)
    dg = rotation_digraph(example_instance)
    rho1 = dg.rotations[0]
    # members m1, m2, w1, w2 have minranks 1, 1, 1, 1 (hand-tabulated); k = 4
    assert extent_of(rho1, profile) == Extent(1 - 7, 1 + 7)


def test_edge_extents_intersect():
    rng = random.Random(97)
    for _ in range(15):
        inst = random_complete_instance(rng, rng.randint(2, 7))
        profile = compute_range(inst)
        dg = rotation_digraph(inst)
        exts = {rho.id: extent_of(rho, profile) for rho in dg.rotations}
        n = inst.n_men
        for a, b in dg.edges:
            lo = max(exts[a].lo, exts[b].lo, 1)
            hi = min(exts[a].hi, exts[b].hi, n)
            assert lo <= hi


def test_construct_path_decomposition_master_list():
    order = [1, 0, 2]
    inst = Instance([order] * 3, [order] * 3)
    dg, x = construct_path_decomposition(inst)
    assert dg.rotations == ()
    assert x == PathDecomposition(())


def test_construct_path_decomposition_example(example_instance):
    dg, x = construct_path_decomposition(example_instance)
    assert validate_decomposition(dg.dag(), x)
    k = compute_range(example_instance).k
    assert x.width <= 50 * k * k
    assert x.is_nice


def test_construct_path_decomposition_random():
    rng = random.Random(101)
    for _ in range(15):
        inst = random_complete_instance(rng, rng.randint(2, 10))
        dg, x = construct_path_decomposition(inst)
        assert validate_decomposition(dg.dag(), x)
        k = compute_range(inst).k
        assert x.width <= 50 * k * k
        # bag cardinality bound holds for every bag
        assert all(len(b) <= 50 * k * k for b in x.bags)


def test_construct_path_decomposition_on_range_outputs():
    from smposet import realize_range

    rng = random.Random(102)
    for _ in range(6):
        g = random_dag(rng, rng.randint(1, 5))
        _w, x0 = pathwidth_exact_tiny(g)
        inst = realize_range(g, to_nice(g, x0))
        dg, x = construct_path_decomposition(inst)
        k = compute_range(inst).k
        assert validate_decomposition(dg.dag(), x)
        assert x.width <= 50 * k * k


def test_pathwidth_path_graph():
    g = Dag(5, [(i, i + 1) for i in range(1, 5)])
    width, x = pathwidth_exact_tiny(g)
    assert width == 1
    assert validate_decomposition(g, x)


def test_pathwidth_clique():
    g = Dag(4, [(u, v) for u in range(1, 5) for v in range(u + 1, 5)])
    width, _x = pathwidth_exact_tiny(g)
    assert width == 3


def test_pathwidth_cap():
    with pytest.raises(CapExceededError):
        pathwidth_exact_tiny(Dag(11, []))


def _vertex_separation_scan(g: Dag) -> int:
    """Second independent oracle: minimum over all vertex layouts of the
    maximum number of placed vertices with a neighbor still unplaced.
    """
    import itertools

    nbrs = {v: set() for v in g.vertices()}
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    best = g.p
    for perm in itertools.permutations(g.vertices()):
        worst = 0
        placed = set()
        for v in perm:
            placed.add(v)
            boundary = sum(1 for u in placed if nbrs[u] - placed)
            worst = max(worst, boundary)
            if worst >= best:
                break
        best = min(best, worst)
    return best


def test_pathwidth_matches_separation_scan():
    rng = random.Random(103)
    for _ in range(12):
        g = random_dag(rng, rng.randint(1, 7), 0.4)
        width, x = pathwidth_exact_tiny(g)
        assert validate_decomposition(g, x)
        assert width == _vertex_separation_scan(g)
        assert x.width == width


def test_interval_property_of_bags():
    rng = random.Random(107)
    for _ in range(10):
        inst = random_complete_instance(rng, 8)
        dg, x = construct_path_decomposition(inst)
        positions = {}
        for i, bag in enumerate(x.bags):
            for v in bag:
                positions.setdefault(v, []).append(i)
        for v, idxs in positions.items():
            assert idxs == list(range(idxs[0], idxs[-1] + 1))
