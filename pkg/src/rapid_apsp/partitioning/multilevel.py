"""
RAPID APSP - 多级 k 路图划分

在对称化的单位权图上做递归二分：
- 粗化: 重边匹配（HEM），按编号顺序访问，同权取编号最小的邻居
- 初始划分: 多个确定性起点的贪心区域生长，取割最小者
- 细化: 边界 Fiduccia–Mattheyses，回滚到最优前缀
最后做一次 k 路贪心边界细化，移动不超过容量上限。

同一输入总是得到同一划分。
"""

from __future__ import annotations

import heapq
import math
from typing import List, Tuple

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order
import structlog

from rapid_apsp.graph.csr import Graph
from rapid_apsp.utils.error_handling import ArgumentError

logger = structlog.get_logger(__name__)

Assignment = npt.NDArray[np.int64]

# 粗化到这个规模以下停止
COARSEN_TO = 40
# 一轮匹配收缩不足该比例时停止粗化
COARSEN_MIN_SHRINK = 0.95
# 顶点数不超过该值时每个顶点都作为生长起点
ALL_SEEDS_LIMIT = 24
MAX_SEEDS = 6
FM_MAX_PASSES = 8
FM_STALL_MOVES = 100
KWAY_PASSES = 4


def symmetrize(g: Graph) -> sp.csr_matrix:
    """有向图 → 无向单位权邻接矩阵（无自环，列有序）"""
    src = g.sources()
    dst = g.col.astype(np.int64)
    a = sp.csr_matrix((np.ones(g.m, dtype=np.int64), (src, dst)), shape=(g.n, g.n))
    a = (a + a.T).tocsr()
    a.data[:] = 1
    a.eliminate_zeros()
    a.sort_indices()
    return a


def edge_cut(g: Graph, assignment: npt.ArrayLike) -> int:
    """对称化单位权图上的割边数"""
    part = np.asarray(assignment, dtype=np.int64)
    a = sp.triu(symmetrize(g)).tocoo()
    return int(np.count_nonzero(part[a.row] != part[a.col]))


def part_sizes(assignment: npt.ArrayLike, k: int) -> npt.NDArray[np.int64]:
    return np.bincount(np.asarray(assignment, dtype=np.int64), minlength=k)


# ----------------------------------------------------------------------
# 粗化
# ----------------------------------------------------------------------


def _heavy_edge_matching(adj: sp.csr_matrix) -> Tuple[npt.NDArray[np.int64], int]:
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    match = [-1] * n
    for u in range(n):
        if match[u] >= 0:
            continue
        best, best_w = u, 0
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if match[v] < 0 and v != u and data[p] > best_w:
                best, best_w = v, data[p]
        match[u] = best
        match[best] = u

    cmap = np.full(n, -1, dtype=np.int64)
    nc = 0
    for u in range(n):
        if cmap[u] < 0:
            cmap[u] = nc
            cmap[match[u]] = nc
            nc += 1
    return cmap, nc


def _contract(
    adj: sp.csr_matrix, vwgt: npt.NDArray[np.int64], cmap: npt.NDArray[np.int64], nc: int
) -> Tuple[sp.csr_matrix, npt.NDArray[np.int64]]:
    n = adj.shape[0]
    proj = sp.csr_matrix((np.ones(n, dtype=np.int64), (np.arange(n), cmap)), shape=(n, nc))
    coarse = (proj.T @ adj @ proj).tocsr()
    coarse = (coarse - sp.diags(coarse.diagonal())).tocsr()
    coarse.eliminate_zeros()
    coarse.sort_indices()
    cw = np.bincount(cmap, weights=vwgt, minlength=nc).astype(np.int64)
    return coarse, cw


# ----------------------------------------------------------------------
# 二分
# ----------------------------------------------------------------------


def _cut(adj: sp.csr_matrix, side: npt.NDArray[np.int8]) -> int:
    mask = side == 0
    return int(adj[mask][:, ~mask].sum())


def _seeds(adj: sp.csr_matrix) -> List[int]:
    n = adj.shape[0]
    if n <= ALL_SEEDS_LIMIT:
        return list(range(n))
    order = breadth_first_order(adj, 0, directed=False, return_predecessors=False)
    candidates = [0, int(order[-1])]
    candidates += [int(x) for x in np.linspace(0, n - 1, MAX_SEEDS).astype(np.int64)]
    seeds: List[int] = []
    for s in candidates:
        if s not in seeds:
            seeds.append(s)
    return seeds[:MAX_SEEDS]


def _grow(adj: sp.csr_matrix, vwgt: npt.NDArray[np.int64], seed: int, target0: int) -> npt.NDArray[np.int8]:
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    vw = vwgt.tolist()
    side = [1] * n
    conn = [0] * n
    heap: List[Tuple[int, int]] = [(0, seed)]
    w0 = 0
    next_free = 0
    while w0 < target0:
        v = -1
        while heap:
            neg, cand = heapq.heappop(heap)
            if side[cand] == 1 and -neg == conn[cand]:
                v = cand
                break
        if v < 0:
            # 连通块已耗尽，取编号最小的未分配顶点
            while side[next_free] == 0:
                next_free += 1
            v = next_free
        side[v] = 0
        w0 += vw[v]
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if side[u] == 1:
                conn[u] += data[p]
                heapq.heappush(heap, (-conn[u], u))
    return np.array(side, dtype=np.int8)


def _fm_refine(
    adj: sp.csr_matrix,
    vwgt: npt.NDArray[np.int64],
    side_in: npt.NDArray[np.int8],
    target0: int,
    tol: int,
) -> npt.NDArray[np.int8]:
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    vw = vwgt.tolist()
    side = side_in.tolist()

    for _ in range(FM_MAX_PASSES):
        gain = [0] * n
        boundary = [False] * n
        external = 0
        for v in range(n):
            for p in range(indptr[v], indptr[v + 1]):
                if side[indices[p]] != side[v]:
                    gain[v] += data[p]
                    external += data[p]
                    boundary[v] = True
                else:
                    gain[v] -= data[p]
        # 对称矩阵中每条割边计两次
        cur_cut = external // 2
        w0 = sum(w for w, s in zip(vw, side) if s == 0)

        heap = [(-gain[v], v) for v in range(n) if boundary[v]]
        heapq.heapify(heap)
        locked = [False] * n
        moves: List[int] = []
        dev = abs(w0 - target0)
        best_key = (dev > tol, cur_cut, dev)
        best_len = 0

        while heap:
            neg, v = heapq.heappop(heap)
            if locked[v] or -neg != gain[v]:
                continue
            new_w0 = w0 - vw[v] if side[v] == 0 else w0 + vw[v]
            new_dev = abs(new_w0 - target0)
            if new_dev > tol and new_dev >= abs(w0 - target0):
                continue
            locked[v] = True
            side[v] = 1 - side[v]
            w0 = new_w0
            cur_cut -= gain[v]
            gain[v] = -gain[v]
            for p in range(indptr[v], indptr[v + 1]):
                u = indices[p]
                if side[u] == side[v]:
                    gain[u] -= 2 * data[p]
                else:
                    gain[u] += 2 * data[p]
                if not locked[u]:
                    heapq.heappush(heap, (-gain[u], u))
            moves.append(v)

            key = (new_dev > tol, cur_cut, new_dev)
            if key < best_key:
                best_key, best_len = key, len(moves)
            elif len(moves) - best_len > FM_STALL_MOVES:
                break

        for v in reversed(moves[best_len:]):
            side[v] = 1 - side[v]
        if best_len == 0:
            break

    return np.array(side, dtype=np.int8)


def _exact_balance(adj: sp.csr_matrix, side: npt.NDArray[np.int8], target0: int) -> npt.NDArray[np.int8]:
    """单位权下把 0 侧调到恰好 target0 个顶点，优先移动增益大（编号小）的顶点"""
    side = side.copy()
    w0 = int(np.count_nonzero(side == 0))
    if w0 == target0:
        return side
    src = 0 if w0 > target0 else 1
    on_src = (side == src).astype(np.int64)
    gain = adj @ (1 - on_src) - adj @ on_src
    candidates = np.flatnonzero(side == src)
    order = np.lexsort((candidates, -gain[candidates]))
    side[candidates[order[: abs(w0 - target0)]]] = 1 - src
    return side


def _bisect(adj: sp.csr_matrix, target0: int) -> npt.NDArray[np.int8]:
    """单位权图的多级二分，0 侧恰好 target0 个顶点"""
    graphs = [(adj, np.ones(adj.shape[0], dtype=np.int64))]
    cmaps: List[npt.NDArray[np.int64]] = []
    while graphs[-1][0].shape[0] > COARSEN_TO:
        cur_adj, cur_w = graphs[-1]
        cmap, nc = _heavy_edge_matching(cur_adj)
        if nc > COARSEN_MIN_SHRINK * cur_adj.shape[0]:
            break
        graphs.append(_contract(cur_adj, cur_w, cmap, nc))
        cmaps.append(cmap)

    c_adj, c_w = graphs[-1]
    tol = max(1, int(c_w.max()))
    best_side = None
    best_key = None
    for seed in _seeds(c_adj):
        side = _fm_refine(c_adj, c_w, _grow(c_adj, c_w, seed, target0), target0, tol)
        dev = abs(int(c_w[side == 0].sum()) - target0)
        key = (dev > tol, _cut(c_adj, side), dev)
        if best_key is None or key < best_key:
            best_side, best_key = side, key
    assert best_side is not None

    side = best_side
    for level in range(len(cmaps) - 1, -1, -1):
        side = side[cmaps[level]]
        f_adj, f_w = graphs[level]
        side = _fm_refine(f_adj, f_w, side, target0, max(1, int(f_w.max())))
    return _exact_balance(adj, side, target0)


def _recursive_bisect(
    adj: sp.csr_matrix,
    verts: npt.NDArray[np.int64],
    k: int,
    first_part: int,
    out: Assignment,
) -> None:
    if k == 1:
        out[verts] = first_part
        return
    k1 = k // 2
    q, r = divmod(verts.size, k)
    # 两侧再各自分成 k1 / k-k1 份时每份都是 q 或 q+1
    target0 = k1 * q + min(r, k1)
    side = _bisect(adj[verts][:, verts].tocsr(), target0)
    _recursive_bisect(adj, verts[side == 0], k1, first_part, out)
    _recursive_bisect(adj, verts[side == 1], k - k1, first_part + k1, out)


# ----------------------------------------------------------------------
# k 路细化
# ----------------------------------------------------------------------


def _kway_refine(adj: sp.csr_matrix, part: Assignment, k: int, cap: int) -> int:
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    where = part.tolist()
    sizes = np.bincount(part, minlength=k).tolist()
    total_moves = 0
    for _ in range(KWAY_PASSES):
        moved = 0
        for v in range(n):
            own = where[v]
            conn: dict[int, int] = {}
            for p in range(indptr[v], indptr[v + 1]):
                q = where[indices[p]]
                conn[q] = conn.get(q, 0) + data[p]
            if not conn or (len(conn) == 1 and own in conn):
                continue
            own_conn = conn.get(own, 0)
            best, best_gain = own, 0
            for q in sorted(conn):
                if q == own or sizes[q] + 1 > cap:
                    continue
                if conn[q] - own_conn > best_gain:
                    best, best_gain = q, conn[q] - own_conn
            if best != own and sizes[own] > 1:
                where[v] = best
                sizes[own] -= 1
                sizes[best] += 1
                moved += 1
        total_moves += moved
        if moved == 0:
            break
    part[:] = where
    return total_moves


def partition_kway(g: Graph, k: int, imbalance: float = 1.03) -> Assignment:
    """
    多级 k 路划分

    Args:
        g: 输入图（方向被忽略）
        k: 分区数
        imbalance: 最大分区不超过 imbalance × ⌈n/k⌉

    Returns:
        长度 n 的分区编号数组

    Raises:
        ArgumentError: k < 1、k > n 或 imbalance < 1
    """
    if k < 1:
        raise ArgumentError("k must be at least 1", details={"k": k})
    if k > g.n:
        raise ArgumentError("cannot split into more parts than vertices", details={"k": k, "n": g.n})
    if imbalance < 1.0:
        raise ArgumentError("imbalance must be >= 1.0", details={"imbalance": imbalance})

    assignment = np.zeros(g.n, dtype=np.int64)
    if k == 1:
        return assignment

    adj = symmetrize(g)
    _recursive_bisect(adj, np.arange(g.n, dtype=np.int64), k, 0, assignment)
    cap = int(math.floor(imbalance * math.ceil(g.n / k)))
    moves = _kway_refine(adj, assignment, k, cap)

    logger.debug(
        "partition_done",
        n=g.n,
        k=k,
        cap=cap,
        refine_moves=moves,
        max_part=int(part_sizes(assignment, k).max()),
    )
    return assignment
