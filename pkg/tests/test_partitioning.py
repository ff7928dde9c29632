"""
图划分测试：k 路划分、边界、边界图与递归层次
"""

import itertools

import numpy as np
import pytest

from conftest import undirected
from rapid_apsp.graph.csr import Graph, csr_to_dense
from rapid_apsp.graph.generators import gen_er, gen_nws
from rapid_apsp.graph.tropical import INF
from rapid_apsp.kernels.floyd_warshall import fw_classic
from rapid_apsp.partitioning import (
    LevelKind,
    boundary_mask,
    build_boundary_graph,
    build_hierarchy,
    default_k_policy,
    edge_cut,
    find_boundary,
    load_assignment,
    part_sizes,
    partition_kway,
    save_assignment,
)
from rapid_apsp.partitioning.hierarchy import make_components
from rapid_apsp.utils.error_handling import (
    ArgumentError,
    ConsistencyError,
    GraphFormatError,
    ParseError,
    StorageError,
)


def complete_graph(n):
    pairs = [(u, v, 1) for u in range(n) for v in range(u + 1, n)]
    return undirected(n, pairs)


def best_balanced_cut(g):
    """穷举所有平衡二分的最小割"""
    n = g.n
    best = None
    for left in itertools.combinations(range(n), n // 2):
        parts = np.ones(n, dtype=np.int64)
        parts[list(left)] = 0
        cut = edge_cut(g, parts)
        best = cut if best is None else min(best, cut)
    return best


class TestPartitionKway:
    """多级 k 路划分"""

    def test_path_split(self, path4):
        parts = partition_kway(path4, 2)
        assert parts[0] == parts[1]
        assert parts[2] == parts[3]
        assert parts[0] != parts[2]
        assert edge_cut(path4, parts) == 1

    def test_single_part(self, small_er):
        parts = partition_kway(small_er, 1)
        assert not parts.any()
        assert edge_cut(small_er, parts) == 0

    def test_covers_and_balances(self):
        g = gen_er(300, 6.0, seed=2)
        parts = partition_kway(g, 5)
        sizes = part_sizes(parts, 5)
        assert sizes.sum() == 300
        assert sizes.max() <= int(1.03 * 60)
        assert set(parts.tolist()) == set(range(5))

    def test_deterministic(self):
        g = gen_nws(200, 4, 0.1, seed=1)
        assert np.array_equal(partition_kway(g, 4), partition_kway(g, 4))

    @pytest.mark.parametrize("seed", range(5))
    def test_near_optimal_on_small_graphs(self, seed):
        g = gen_er(10, 2.5, seed=seed)
        parts = partition_kway(g, 2)
        assert part_sizes(parts, 2).max() <= 5
        assert edge_cut(g, parts) <= 2 * best_balanced_cut(g)

    def test_rejects_bad_k(self, path4):
        with pytest.raises(ArgumentError):
            partition_kway(path4, 0)
        with pytest.raises(ArgumentError):
            partition_kway(path4, 5)

    def test_rejects_bad_imbalance(self, path4):
        with pytest.raises(ArgumentError):
            partition_kway(path4, 2, imbalance=0.5)

    def test_k_policy(self):
        assert default_k_policy(100, 32) == 4
        assert default_k_policy(32, 32) == 1


class TestBoundary:
    """边界顶点"""

    def test_path_boundary(self, path4):
        parts = np.array([0, 0, 1, 1])
        assert find_boundary(path4, parts, 0).tolist() == [1]
        assert find_boundary(path4, parts, 1).tolist() == [2]

    def test_isolated_part(self, two_islands):
        parts = np.array([0, 0, 0, 1, 1, 1])
        assert find_boundary(two_islands, parts, 0).size == 0

    def test_complete_graph(self):
        g = complete_graph(6)
        parts = np.array([0, 1, 0, 1, 2, 2])
        assert boundary_mask(g, parts).all()

    def test_directed_edges_count_both_ways(self):
        g = Graph.from_edges(3, [0], [2], [1])
        parts = np.array([0, 0, 1])
        assert find_boundary(g, parts, 0).tolist() == [0]
        assert find_boundary(g, parts, 1).tolist() == [2]

    def test_invalid_part(self, path4):
        with pytest.raises(ArgumentError):
            find_boundary(path4, np.array([0, 0, 1, 1]), 2)

    def test_components_boundary_first(self, path4):
        comps = make_components(path4, np.array([0, 0, 1, 1]), 0, np.arange(4))
        assert comps[0].vertices.tolist() == [1, 0]
        assert comps[0].boundary_count == 1
        assert comps[1].vertices.tolist() == [2, 3]

    @pytest.mark.parametrize("degree", [4, 8])
    def test_small_world_has_smaller_boundary(self, degree):
        """同 n 同度数下，NWS 的平均边界规模小于 ER"""
        n, k = 256, 4
        nws, er = [], []
        for seed in range(10):
            g = gen_nws(n, degree, 0.05, seed=seed)
            nws.append(int(boundary_mask(g, partition_kway(g, k)).sum()))
            g = gen_er(n, float(degree), seed=seed)
            er.append(int(boundary_mask(g, partition_kway(g, k)).sum()))
        assert np.mean(nws) < np.mean(er)


def closures(g, comps):
    return [fw_classic(csr_to_dense(g, c.members)) for c in comps]


class TestBoundaryGraph:
    """边界图构造"""

    def test_single_cross_edge(self):
        g = undirected(4, [(0, 1, 1), (1, 2, 6), (2, 3, 1)])
        comps = make_components(g, np.array([0, 0, 1, 1]), 0, np.arange(4))
        bg = build_boundary_graph(g, comps, closures(g, comps))
        assert bg.n == 2
        # 无向边在有向表示中为一对弧
        assert sorted(bg.graph.edges()) == [(0, 1, 6), (1, 0, 6)]
        assert bg.members.tolist() == [1, 2]
        assert bg.offsets.tolist() == [0, 1, 2]

    def test_virtual_edge(self):
        # 分区 {0,1,2} 的边界为 {0, 2}，两者之间只有经 1 的路径，长度 5
        g = undirected(5, [(0, 1, 2), (1, 2, 3), (0, 3, 1), (2, 4, 1), (3, 4, 50)])
        comps = make_components(g, np.array([0, 0, 0, 1, 1]), 0, np.arange(5))
        bg = build_boundary_graph(g, comps, closures(g, comps))
        d = csr_to_dense(bg.graph)
        u, w = 0, 1  # 分区 0 的边界在边界图中的编号
        assert bg.members[[u, w]].tolist() == [0, 2]
        assert d[u, w] == 5 and d[w, u] == 5

    def test_mixed_virtual_and_cross_edges(self):
        g = Graph.from_edges(
            4,
            [0, 2, 0, 1, 3],
            [2, 1, 3, 3, 1],
            [3, 4, 4, 1, 1],
        )
        parts = np.array([0, 1, 0, 1])
        comps = make_components(g, parts, 0, np.arange(4))
        # 分区 0 = {0, 2}，分区 1 = {1, 3}，四个顶点都是边界
        bg = build_boundary_graph(g, comps, closures(g, comps))
        d = csr_to_dense(bg.graph)
        pos = {int(v): i for i, v in enumerate(bg.members.tolist())}
        # 0→3 为跨分区边，0→2 为分区内闭包给出的虚拟边
        assert d[pos[0], pos[3]] == 4
        assert d[pos[0], pos[2]] == 3

    def test_cross_edge_beats_virtual_path(self):
        # 1→2 的跨分区边权 4，边界图中 1→0→2 的路径长 7
        g = Graph.from_edges(4, [1, 1, 0], [2, 0, 2], [4, 1, 6])
        parts = np.array([0, 0, 1, 1])
        comps = make_components(g, parts, 0, np.arange(4))
        bg = build_boundary_graph(g, comps, closures(g, comps))
        d = csr_to_dense(bg.graph)
        pos = {int(v): i for i, v in enumerate(bg.members.tolist())}
        assert d[pos[1], pos[2]] == 4
        assert d[pos[0], pos[2]] == 6

    def test_intra_count_mismatch(self, path4):
        comps = make_components(path4, np.array([0, 0, 1, 1]), 0, np.arange(4))
        with pytest.raises(ConsistencyError):
            build_boundary_graph(path4, comps, [])


class TestHierarchy:
    """递归层次"""

    def test_small_graph_single_level(self, small_er):
        h = build_hierarchy(small_er, tile_limit=32)
        assert h.depth == 1
        assert h.top.kind == LevelKind.TOP
        assert len(h.top.components) == 1
        assert h.top.boundary_total == 0

    @pytest.mark.parametrize("seed", range(4))
    def test_components_fit_tile(self, seed):
        g = gen_nws(100, 4, 0.05, seed=seed)
        h = build_hierarchy(g, tile_limit=32)
        for level in h.levels:
            assert max(c.size for c in level.components) <= 32
            members = np.concatenate([c.members for c in level.components])
            assert sorted(members.tolist()) == list(range(level.n))
        if h.top.kind == LevelKind.TOP:
            assert h.top.n <= 32

    def test_recursive_levels_link(self, ring_graph):
        h = build_hierarchy(ring_graph, tile_limit=16)
        assert h.depth >= 2
        for lower, upper in zip(h.levels, h.levels[1:]):
            assert lower.kind == LevelKind.RECURSIVE
            assert upper.n == lower.boundary_total
            assert np.array_equal(upper.global_ids, lower.global_ids[lower.boundary_graph.members])

    def test_boundary_stagnation_goes_blocked(self):
        g = complete_graph(40)
        h = build_hierarchy(g, tile_limit=16)
        assert h.depth == 1
        assert h.top.kind == LevelKind.BLOCKED
        assert all(c.size <= 16 for c in h.top.components)
        assert not h.top_within_tile

    def test_dense_random_graph_flags_oversize_top(self):
        """度 25 的 ER 图几乎全是边界，顶层停在分块层并标记超出 tile"""
        g = gen_er(400, 25.0, seed=1)
        h = build_hierarchy(g, tile_limit=64)
        assert h.top.kind == LevelKind.BLOCKED
        assert h.top.n > 64
        assert not h.top_within_tile
        for level in h.levels:
            assert max(c.size for c in level.components) <= 64

    @pytest.mark.parametrize("seed", range(4))
    def test_sparse_top_fits_tile(self, seed):
        h = build_hierarchy(gen_nws(300, 4, 0.02, seed=seed), tile_limit=32)
        assert h.top_within_tile == (h.top.kind == LevelKind.TOP)
        if h.top.kind == LevelKind.TOP:
            assert h.top.n <= 32

    def test_imported_assignment(self, path4):
        h = build_hierarchy(path4, tile_limit=2, assignment=[0, 0, 1, 1])
        assert h.levels[0].assignment.tolist() == [0, 0, 1, 1]
        assert h.levels[0].kind == LevelKind.RECURSIVE

    def test_oversize_import_is_resplit(self):
        g = gen_nws(40, 4, 0.0, seed=0)
        h = build_hierarchy(g, tile_limit=16, assignment=np.zeros(40, dtype=np.int64))
        assert max(c.size for c in h.levels[0].components) <= 16

    def test_rejects_tiny_tile(self, path4):
        with pytest.raises(ArgumentError):
            build_hierarchy(path4, tile_limit=1)

    def test_rejects_short_assignment(self, path4):
        with pytest.raises(ArgumentError):
            build_hierarchy(path4, tile_limit=2, assignment=[0, 1])

    def test_local_distances_are_closures(self, ring_graph):
        h = build_hierarchy(ring_graph, tile_limit=32)
        level = h.levels[0]
        for comp, dist in zip(level.components, level.local_distances):
            assert np.array_equal(dist, fw_classic(csr_to_dense(level.graph, comp.members)))
            assert dist.shape == (comp.size, comp.size)

    def test_unreachable_boundary_pairs_have_no_virtual_edge(self):
        g = Graph.from_edges(4, [0, 2], [2, 1], [1, 1])
        comps = make_components(g, np.array([0, 0, 1, 1]), 0, np.arange(4))
        dist = closures(g, comps)
        assert dist[0][0, 1] == INF
        bg = build_boundary_graph(g, comps, dist)
        assert bg.graph.m == 2


class TestAssignmentFile:
    def test_roundtrip(self, tmp_path):
        path = save_assignment([0, 2, 1, 1], tmp_path / "parts.txt")
        assert path.read_text() == "0\n2\n1\n1\n"
        assert load_assignment(path, 4).tolist() == [0, 2, 1, 1]

    def test_length_mismatch(self, tmp_path):
        path = save_assignment([0, 1], tmp_path / "parts.txt")
        with pytest.raises(GraphFormatError):
            load_assignment(path, 3)

    def test_bad_line(self, tmp_path):
        path = tmp_path / "parts.txt"
        path.write_text("0\nabc\n")
        with pytest.raises(ParseError):
            load_assignment(path)

    def test_missing(self, tmp_path):
        with pytest.raises(StorageError):
            load_assignment(tmp_path / "none.txt")
