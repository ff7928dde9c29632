"""
Floyd-Warshall 与 min-plus 内核测试
"""

import numpy as np
import pytest

from conftest import reference_distances, undirected
from rapid_apsp.graph.csr import csr_to_dense
from rapid_apsp.graph.generators import gen_er
from rapid_apsp.graph.tropical import INF, tropical_identity
from rapid_apsp.kernels.floyd_warshall import (
    KernelStats,
    PanelLayout,
    block_ranges,
    fw_blocked,
    fw_classic,
    fw_remapped,
)
from rapid_apsp.kernels.min_plus import cross_merge, inject, min_plus_product, restrict
from rapid_apsp.solver.verifier import dijkstra
from rapid_apsp.utils.error_handling import ArgumentError, ConsistencyError, PreconditionError


def with_zero_diagonal(mat):
    out = mat.copy()
    np.fill_diagonal(out, 0)
    return out


class TestFloydWarshall:
    """三种 FW 实现"""

    def test_no_intermediate(self):
        d = np.array([[0, 3], [INF, 0]], dtype=np.uint32)
        assert fw_classic(d).tolist() == [[0, 3], [INF, 0]]

    def test_triangle(self, triangle):
        d = fw_classic(csr_to_dense(triangle))
        assert d[0, 2] == 7

    def test_input_untouched(self, triangle):
        d = csr_to_dense(triangle)
        fw_classic(d)
        assert d[0, 2] == 10

    def test_inplace(self, triangle):
        d = csr_to_dense(triangle)
        out = fw_classic(d, inplace=True)
        assert out is d and d[0, 2] == 7

    def test_matches_dijkstra(self):
        g = gen_er(16, 3.0, seed=21)
        d = fw_classic(csr_to_dense(g))
        for s in range(g.n):
            assert np.array_equal(d[s], dijkstra(g, s))

    def test_idempotent(self, small_er):
        d = fw_classic(csr_to_dense(small_er))
        assert np.array_equal(fw_classic(d), d)

    def test_nonzero_diagonal(self):
        with pytest.raises(PreconditionError):
            fw_classic(np.array([[1, 2], [3, 0]], dtype=np.uint32))

    def test_not_square(self):
        with pytest.raises(ArgumentError):
            fw_classic(np.zeros((2, 3), dtype=np.uint32))

    def test_empty(self):
        assert fw_classic(np.zeros((0, 0), dtype=np.uint32)).shape == (0, 0)

    def test_update_count(self, triangle):
        stats = KernelStats()
        fw_classic(csr_to_dense(triangle), stats=stats)
        # 只有 D[0][2] 经顶点 1 改善一次
        assert stats.updates == 1
        assert stats.pivots == 3

    def test_remapped_2x2(self):
        d = np.array([[0, 4], [INF, 0]], dtype=np.uint32)
        assert np.array_equal(fw_remapped(d), fw_classic(d))

    @pytest.mark.parametrize("seed", range(15))
    @pytest.mark.parametrize("n", [1, 2, 3, 17, 64, 127, 128])
    def test_remapped_matches_classic(self, n, seed, random_matrix):
        inf_share = (0.3, 0.6, 0.8, 0.95, 1.0)[seed % 5]
        d = with_zero_diagonal(random_matrix(n, n, seed=seed, inf_share=inf_share))
        a, b = KernelStats(), KernelStats()
        assert np.array_equal(fw_remapped(d, stats=a), fw_classic(d, stats=b))
        assert a.updates == b.updates

    def test_panel_layout_reassembles(self, random_matrix):
        d = with_zero_diagonal(random_matrix(7, 7, seed=3))
        for pivot in range(7):
            layout = PanelLayout.extract(d, pivot)
            assert np.array_equal(layout.assemble(), d)

    @pytest.mark.parametrize("sizes", [[8, 8, 8], [5, 11, 8], [24], [1, 23]])
    def test_blocked_matches_classic(self, sizes, random_matrix):
        d = with_zero_diagonal(random_matrix(24, 24, seed=len(sizes), inf_share=0.85))
        calls = []
        out = fw_blocked(d, sizes, on_kernel=calls.append)
        assert np.array_equal(out, fw_classic(d))
        assert all(c.rows <= max(sizes) and c.inner <= max(sizes) for c in calls)
        assert sum(c.kind == "fw" for c in calls) == len(sizes)

    def test_blocked_sizes_must_cover(self):
        with pytest.raises(ArgumentError):
            fw_blocked(tropical_identity(4), [2, 1])

    def test_block_ranges(self):
        assert block_ranges([2, 3]) == [(0, 2), (2, 5)]
        with pytest.raises(ArgumentError):
            block_ranges([2, 0])


class TestMinPlus:
    """min-plus 乘积与层间搬运"""

    def test_hand_arithmetic(self):
        out = min_plus_product([[1, 2]], [[3], [4]])
        assert out.tolist() == [[4]]

    def test_identity(self, random_matrix):
        b = random_matrix(6, 9, seed=1)
        assert np.array_equal(min_plus_product(tropical_identity(6), b), b)

    def test_associative(self, random_matrix):
        a, b, c = (random_matrix(8, 8, seed=s) for s in (1, 2, 3))
        left = min_plus_product(min_plus_product(a, b), c)
        right = min_plus_product(a, min_plus_product(b, c))
        assert np.array_equal(left, right)

    def test_matches_brute_force(self, random_matrix):
        a = random_matrix(5, 7, seed=4)
        b = random_matrix(7, 3, seed=5)
        expected = np.full((5, 3), INF, dtype=np.uint64)
        for i in range(5):
            for j in range(3):
                for t in range(7):
                    expected[i, j] = min(expected[i, j], min(int(a[i, t]) + int(b[t, j]), INF))
        assert np.array_equal(min_plus_product(a, b), expected.astype(np.uint32))

    def test_empty_inner(self):
        assert min_plus_product(np.zeros((2, 0)), np.zeros((0, 3))).tolist() == [[INF] * 3] * 2

    def test_inner_mismatch(self):
        with pytest.raises(ArgumentError):
            min_plus_product(np.zeros((2, 3)), np.zeros((2, 3)))

    def test_restrict(self, random_matrix):
        d = random_matrix(6, 6, seed=2)
        assert np.array_equal(restrict(d, range(6)), d)
        assert restrict(with_zero_diagonal(d), [4]).tolist() == [[0]]
        outer = [5, 1, 3, 0]
        inner = [2, 0]
        assert np.array_equal(restrict(restrict(d, outer), inner), restrict(d, [outer[i] for i in inner]))

    def test_inject_min_overwrite(self):
        d = np.array([[0, 9], [9, 0]], dtype=np.uint32)
        assert np.array_equal(inject(d, [[0, 10], [10, 0]], [0, 1]), d)
        out = inject(d, [[0, 1], [INF, 0]], [0, 1])
        assert out.tolist() == [[0, 1], [9, 0]]
        assert d[0, 1] == 9

    def test_inject_shape_mismatch(self):
        with pytest.raises(ArgumentError):
            inject(tropical_identity(3), tropical_identity(3), [0, 1])

    def test_inject_then_fw_recovers_global(self):
        # 两个分区 {0,1,2} 与 {3,4,5}；分区内 0→2 的最短路要绕经另一分区
        g = undirected(6, [(0, 1, 10), (1, 2, 10), (0, 3, 1), (3, 4, 1), (4, 2, 1), (4, 5, 3)])
        glob = reference_distances(g)
        part = [0, 1, 2]
        local = fw_classic(csr_to_dense(g, part))
        assert local[0, 2] == 20
        # 边界 {0, 2}：把全局边界距离注入后重跑
        boundary = [0, 2]
        db = restrict(glob, boundary)
        fixed = fw_classic(inject(local, db, [part.index(b) for b in boundary]))
        assert np.array_equal(fixed, restrict(glob, part))

    def test_cross_merge_scalar(self):
        d1 = np.array([[0, 2], [3, 0]], dtype=np.uint32)
        d2 = np.array([[0, 1], [4, 0]], dtype=np.uint32)
        db = np.array([[0, 5], [5, 0]], dtype=np.uint32)
        out = cross_merge(d1, db, d2, [10], [20], db_rows=[10, 20])
        assert out.tolist() == [[5, 6], [8, 9]]

    def test_cross_merge_unreachable(self):
        d1 = tropical_identity(2)
        d2 = tropical_identity(2)
        db = np.full((2, 2), INF, dtype=np.uint32)
        assert (cross_merge(d1, db, d2, [0], [1], db_rows=[0, 1]) == INF).all()

    def test_cross_merge_row_selection(self):
        d1 = np.array([[0, 2], [3, 0]], dtype=np.uint32)
        d2 = np.array([[0, 1], [4, 0]], dtype=np.uint32)
        db = np.array([[7]], dtype=np.uint32)
        out = cross_merge(d1, db, d2, [10], [20], db_rows=[10], db_cols=[20], rows=[1], cols=[1])
        assert out.tolist() == [[3 + 7 + 1]]

    def test_cross_merge_missing_boundary(self):
        with pytest.raises(ConsistencyError):
            eye = tropical_identity(2)
            cross_merge(eye, eye, eye, [7], [0], db_rows=[0, 1])

    @pytest.mark.parametrize("seed", range(20))
    def test_cross_merge_matches_triple_loop(self, seed):
        """逐项对照 min_{i,j} D1[m,i] + DB[i,j] + D2[j,n]，含 INF 与接近 2^32-2 的饱和值"""
        rng = np.random.default_rng(seed)
        pool = np.array([0, 1, 7, 500, INF - 2000, INF - 3, INF - 2, INF - 1, INF, INF], dtype=np.uint32)

        def draw(rows, cols):
            return pool[rng.integers(0, pool.size, size=(rows, cols))]

        n1, n2, k1, k2 = 5, 6, 3, 2
        d1, d2 = draw(n1, 7), draw(4, n2)
        b1 = [40, 12, 7]
        b2 = [3, 51]
        db_rows = [12, 99, 7, 40]
        db_cols = [51, 8, 3]
        db = draw(len(db_rows), len(db_cols))

        expected = np.full((n1, n2), INF, dtype=np.uint64)
        for m in range(n1):
            for n in range(n2):
                for i in range(k1):
                    for j in range(k2):
                        total = (
                            int(d1[m, i])
                            + int(db[db_rows.index(b1[i]), db_cols.index(b2[j])])
                            + int(d2[j, n])
                        )
                        expected[m, n] = min(int(expected[m, n]), total, INF)
        out = cross_merge(d1, db, d2, b1, b2, db_rows=db_rows, db_cols=db_cols)
        assert out.dtype == np.uint32
        assert np.array_equal(out, expected.astype(np.uint32))
        one = cross_merge(d1, db, d2, b1, b2, db_rows=db_rows, db_cols=db_cols, rows=[3], cols=[0, 5])
        assert np.array_equal(one, expected[[3]][:, [0, 5]].astype(np.uint32))

    def test_cross_merge_saturates_near_limit(self):
        d1 = np.array([[INF - 2]], dtype=np.uint32)
        db = np.array([[0]], dtype=np.uint32)
        finite = cross_merge(d1, db, np.array([[0]], dtype=np.uint32), [0], [0], db_rows=[0])
        assert finite.tolist() == [[INF - 2]]
        capped = cross_merge(d1, db, np.array([[5]], dtype=np.uint32), [0], [0], db_rows=[0])
        assert capped.tolist() == [[INF]]

    def test_cross_merge_matches_global(self):
        # 两个 8 顶点环，由两条跨分区边连接
        edges = [(i, (i + 1) % 8, i + 1) for i in range(8)]
        edges += [(8 + i, 8 + (i + 1) % 8, 2) for i in range(8)]
        edges += [(3, 9, 5), (6, 14, 4)]
        g = undirected(16, edges)
        glob = reference_distances(g)
        c1 = [3, 6, 0, 1, 2, 4, 5, 7]
        c2 = [9, 14, 8, 10, 11, 12, 13, 15]
        b1, b2 = c1[:2], c2[:2]
        # 分区闭包使用全局距离限制（精确的分区内距离）
        d1 = restrict(glob, c1)
        d2 = restrict(glob, c2)
        boundary = b1 + b2
        db = restrict(glob, boundary)
        out = cross_merge(d1, db, d2, b1, b2, db_rows=boundary)
        assert np.array_equal(out, glob[np.ix_(c1, c2)])
