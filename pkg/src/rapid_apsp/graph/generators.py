"""
RAPID APSP - 合成图生成器

Erdős–Rényi (ER) 有向随机图与 Newman–Watts–Strogatz (NWS) 小世界图。
所有随机性来自显式的64位种子，结果逐位可复现。
"""

from __future__ import annotations

import numpy as np
import structlog

from rapid_apsp.graph.csr import Graph
from rapid_apsp.utils.error_handling import ArgumentError

logger = structlog.get_logger(__name__)

WEIGHT_LOW = 1
WEIGHT_HIGH = 1000
# 分块行数固定，保证与种子一一对应
_ER_ROW_CHUNK = 256


def _rng(seed: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ArgumentError("seed must be a 64-bit unsigned integer", details={"seed": seed})
    return np.random.default_rng(int(seed))


def gen_er(n: int, degree: float, seed: int) -> Graph:
    """
    有向 ER 图

    每条弧 (u, v), u != v 独立以 p = degree / (n - 1) 出现，权值均匀取自 [1, 1000]。

    Raises:
        ArgumentError: degree 不在 (0, n) 内
    """
    if n < 2 or not 0 < degree < n:
        raise ArgumentError("ER requires n >= 2 and 0 < degree < n", details={"n": n, "degree": degree})
    rng = _rng(seed)
    p = min(1.0, degree / (n - 1))

    src_parts = []
    dst_parts = []
    for lo in range(0, n, _ER_ROW_CHUNK):
        hi = min(n, lo + _ER_ROW_CHUNK)
        mask = rng.random((hi - lo, n)) < p
        rows = np.arange(lo, hi)
        mask[rows - lo, rows] = False
        r, c = np.nonzero(mask)
        src_parts.append(r + lo)
        dst_parts.append(c)

    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    weight = rng.integers(WEIGHT_LOW, WEIGHT_HIGH + 1, size=src.size)
    g = Graph.from_edges(n, src, dst, weight)
    logger.debug("er_generated", n=n, degree=degree, seed=seed, arcs=g.m)
    return g


def gen_nws(n: int, k: int, p: float, seed: int) -> Graph:
    """
    Newman–Watts–Strogatz 图

    环形格点中每个顶点与最近的 k 个邻居相连（每侧 k/2 个），随后对每条格点边以概率 p
    追加一条指向随机顶点的捷径边（不重连）。无向边以双向弧表示，两个方向权值相同。

    Raises:
        ArgumentError: k 非偶数、k 不在 (0, n) 内或 p 不在 [0, 1] 内
    """
    if k <= 0 or k % 2 or k >= n:
        raise ArgumentError("NWS requires even k with 0 < k < n", details={"n": n, "k": k})
    if not 0.0 <= p <= 1.0:
        raise ArgumentError("NWS shortcut probability must lie in [0, 1]", details={"p": p})
    rng = _rng(seed)

    edges: dict[tuple[int, int], None] = {}
    adjacency: list[set[int]] = [set() for _ in range(n)]

    def add(u: int, v: int) -> None:
        a, b = (u, v) if u < v else (v, u)
        if (a, b) not in edges:
            edges[(a, b)] = None
            adjacency[a].add(b)
            adjacency[b].add(a)

    lattice = [(u, (u + j) % n) for j in range(1, k // 2 + 1) for u in range(n)]
    for u, v in lattice:
        add(u, v)

    # 对每条格点边掷一次硬币；与 networkx 相同，已饱和的顶点跳过
    for u, _ in lattice:
        if rng.random() >= p:
            continue
        if len(adjacency[u]) >= n - 1:
            continue
        w = int(rng.integers(0, n))
        while w == u or w in adjacency[u]:
            w = int(rng.integers(0, n))
        add(u, w)

    pairs = np.array(list(edges.keys()), dtype=np.int64).reshape(-1, 2)
    weight = rng.integers(WEIGHT_LOW, WEIGHT_HIGH + 1, size=pairs.shape[0])
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    g = Graph.from_edges(n, src, dst, np.concatenate([weight, weight]))
    logger.debug("nws_generated", n=n, k=k, p=p, seed=seed, arcs=g.m)
    return g
