import itertools

import numpy as np
import pytest

from cayleypotts.oracle import (
    MAX_CONFIGS,
    ConfigSpaceTooLarge,
    TreeGraph,
    brute_conditional,
    brute_partition,
    build_tree,
)
from cayleypotts.partition import TreeKind, TreeSpec


def _connected_acyclic(g: TreeGraph) -> bool:
    return g.n_edges == g.n_vertices - 1 and all(d >= 0 for d in g.distances())


@pytest.mark.parametrize(
    "spec, nv, ne",
    [
        (TreeSpec(1), 3, 2),
        (TreeSpec(4), 31, 30),
        (TreeSpec(2, TreeKind.UNROOTED), 10, 9),
        (TreeSpec(0), 1, 0),
    ],
)
def test_build_tree_counts(spec, nv, ne):
    g = build_tree(spec)
    assert g.n_vertices == nv
    assert g.n_edges == ne
    assert _connected_acyclic(g)


@pytest.mark.parametrize("n", range(1, 5))
def test_rooted_degree_profile(n):
    g = build_tree(TreeSpec(n))
    deg = [len(a) for a in g.adjacency]
    dist = g.distances()
    assert deg[g.root] == 2
    for v, d in enumerate(dist):
        if v == g.root:
            continue
        assert deg[v] == (1 if d == n else 3)
    assert max(dist) == n


@pytest.mark.parametrize("n", range(1, 5))
def test_unrooted_degree_profile(n):
    g = build_tree(TreeSpec(n, TreeKind.UNROOTED))
    deg = [len(a) for a in g.adjacency]
    dist = g.distances()
    assert deg[g.root] == 3
    for v, d in enumerate(dist):
        if v != g.root:
            assert deg[v] == (1 if d == n else 3)


def test_single_vertex():
    g = build_tree(TreeSpec(0))
    for z in (0.5, 2 + 1j):
        assert brute_partition(g, z, 0.7, 3) == pytest.approx(1 + 2 * z)


def test_all_weights_one():
    assert brute_partition(build_tree(TreeSpec(1)), 1.0, 1.0, 2) == pytest.approx(8)


def test_t_zero_keeps_only_constant_configurations():
    g = build_tree(TreeSpec(2))
    assert brute_partition(g, 1.0, 0.0, 3) == pytest.approx(3)
    z = 0.7 - 0.2j
    assert brute_partition(g, z, 0.0, 3) == pytest.approx(1 + 2 * z**7)


def _naive(g, z, t, q):
    """Direct double loop over configurations, no grouping."""
    total = 0j
    for spins in itertools.product(range(q), repeat=g.n_vertices):
        k = sum(s == 0 for s in spins)
        m = sum(spins[i] != spins[j] for i, j in g.edges)
        total += z ** (g.n_vertices - k) * t**m
    return total


@pytest.mark.parametrize("spec, q", [(TreeSpec(1), 3), (TreeSpec(2), 2), (TreeSpec(1, TreeKind.UNROOTED), 3)])
def test_grouped_enumeration_matches_naive_loop(spec, q):
    g = build_tree(spec)
    z, t = 0.4 + 0.3j, 0.6
    assert brute_partition(g, z, t, q) == pytest.approx(_naive(g, z, t, q), rel=1e-13)


@pytest.mark.parametrize("q", [3, 4])
def test_nonzero_spin_relabelling(q):
    g = build_tree(TreeSpec(2))
    z, t = 0.8 + 0.5j, 0.35
    vals = [brute_conditional(g, z, t, q, s) for s in range(1, q)]
    for v in vals[1:]:
        assert v == pytest.approx(vals[0], rel=1e-13)


def test_conditionals_sum_to_total():
    g = build_tree(TreeSpec(2))
    z, t, q = 1.1 - 0.4j, 2.0, 3
    total = sum(brute_conditional(g, z, t, q, s) for s in range(q))
    assert total == pytest.approx(brute_partition(g, z, t, q), rel=1e-13)


def test_config_space_cap():
    g = build_tree(TreeSpec(4))  # 31 vertices
    assert 2**31 > MAX_CONFIGS
    with pytest.raises(ConfigSpaceTooLarge):
        brute_partition(g, 1.0, 0.5, 2)


def test_root_spin_range():
    with pytest.raises(ValueError):
        brute_conditional(build_tree(TreeSpec(1)), 1.0, 0.5, 2, 2)
