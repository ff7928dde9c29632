"""
RAPID APSP 测试公共夹具
"""

import numpy as np
import pytest

from rapid_apsp.graph.csr import Graph, csr_to_dense
from rapid_apsp.graph.generators import gen_er, gen_nws
from rapid_apsp.graph.tropical import DistanceMatrix
from rapid_apsp.kernels.floyd_warshall import fw_classic
from rapid_apsp.simulator.device import DeviceConfig


def undirected(n, edges):
    """无向边列表 → 双向弧的 Graph"""
    src = [u for u, v, _ in edges] + [v for u, v, _ in edges]
    dst = [v for u, v, _ in edges] + [u for u, v, _ in edges]
    w = [w for _, _, w in edges] * 2
    return Graph.from_edges(n, src, dst, w)


def reference_distances(g: Graph) -> DistanceMatrix:
    """整图稠密 FW，作为对照"""
    return fw_classic(csr_to_dense(g))


@pytest.fixture
def triangle():
    """0→1 w=5, 1→2 w=2, 0→2 w=10"""
    return Graph.from_edges(3, [0, 1, 0], [1, 2, 2], [5, 2, 10])


@pytest.fixture
def path4():
    """无向路径 0–1–2–3，单位权"""
    return undirected(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])


@pytest.fixture
def two_islands():
    """两个互不连通的三角形"""
    edges = [(0, 1, 2), (1, 2, 3), (0, 2, 7), (3, 4, 1), (4, 5, 1), (3, 5, 4)]
    return undirected(6, edges)


@pytest.fixture
def small_er():
    return gen_er(16, 3.0, seed=11)


@pytest.fixture
def ring_graph():
    """稀疏小世界图：划分后边界很小，会形成多层递归"""
    return gen_nws(160, 4, 0.03, seed=5)


@pytest.fixture
def random_matrix():
    def make(rows, cols, seed=0, inf_share=0.3):
        rng = np.random.default_rng(seed)
        mat = rng.integers(0, 1000, size=(rows, cols)).astype(np.uint32)
        mat[rng.random((rows, cols)) < inf_share] = np.iinfo(np.uint32).max
        return mat

    return make


@pytest.fixture
def device():
    return DeviceConfig()
