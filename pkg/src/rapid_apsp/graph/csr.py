"""
RAPID APSP - CSR图数据模型

Graph 以压缩稀疏行 {rowptr, col, val} 形式保存有向带权图，构造后不可变。
规范形式：每行 col 严格递增、无自环、所有权值有限。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import structlog

from rapid_apsp.graph.tropical import DIST_DTYPE, INF, DistanceMatrix, as_distance_matrix
from rapid_apsp.utils.error_handling import ArgumentError, GraphFormatError, VertexRangeError

logger = structlog.get_logger(__name__)

ROWPTR_DTYPE = np.uint64
COL_DTYPE = np.uint32


def _frozen(arr: npt.NDArray, dtype: npt.DTypeLike) -> npt.NDArray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Graph:
    """
    有向带权图（CSR）

    Attributes:
        n: 顶点数
        rowptr: n+1 个边偏移
        col: 目标顶点
        val: 32位无符号边权
    """

    n: int
    rowptr: npt.NDArray[np.uint64]
    col: npt.NDArray[np.uint32]
    val: npt.NDArray[np.uint32]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ArgumentError("vertex count must be non-negative", details={"n": self.n})
        object.__setattr__(self, "rowptr", _frozen(self.rowptr, ROWPTR_DTYPE))
        object.__setattr__(self, "col", _frozen(self.col, COL_DTYPE))
        object.__setattr__(self, "val", _frozen(self.val, DIST_DTYPE))
        self._validate()

    def _validate(self) -> None:
        rowptr, col, val = self.rowptr, self.col, self.val
        if rowptr.shape != (self.n + 1,):
            raise GraphFormatError("rowptr must have n+1 entries")
        if rowptr[0] != 0 or int(rowptr[-1]) != col.size or col.size != val.size:
            raise GraphFormatError("rowptr[0] must be 0 and rowptr[n] must equal |col| = |val|")
        if np.any(np.diff(rowptr.astype(np.int64)) < 0):
            raise GraphFormatError("rowptr must be non-decreasing")
        if col.size and int(col.max()) >= self.n:
            raise VertexRangeError(
                "column index out of range", details={"n": self.n, "max_col": int(col.max())}
            )
        if val.size and int(val.max()) >= INF:
            raise GraphFormatError("edge weights must be finite (< INF)")
        if col.size:
            src = self.sources()
            if np.any(src == col):
                raise GraphFormatError("self-loops are not allowed in canonical CSR")
            same_row = src[1:] == src[:-1]
            if np.any(same_row & (col[1:] <= col[:-1])):
                raise GraphFormatError("column indices must be strictly increasing within a row")

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        n: int,
        src: npt.ArrayLike,
        dst: npt.ArrayLike,
        weight: npt.ArrayLike,
    ) -> "Graph":
        """
        由边列表构造规范CSR

        丢弃自环；重复边 (u, v) 合并为最小权值。
        """
        src_a = np.asarray(src, dtype=np.int64).ravel()
        dst_a = np.asarray(dst, dtype=np.int64).ravel()
        w_a = np.asarray(weight, dtype=np.int64).ravel()
        if not (src_a.size == dst_a.size == w_a.size):
            raise ArgumentError("edge arrays must have equal length")
        if src_a.size:
            bad = (src_a < 0) | (src_a >= n) | (dst_a < 0) | (dst_a >= n)
            if np.any(bad):
                first = int(np.flatnonzero(bad)[0])
                raise VertexRangeError(
                    "edge endpoint out of range",
                    details={"n": n, "edge": (int(src_a[first]), int(dst_a[first]))},
                )
            if np.any((w_a < 0) | (w_a >= INF)):
                raise ArgumentError("edge weights must lie in [0, INF)")

        keep = src_a != dst_a
        src_a, dst_a, w_a = src_a[keep], dst_a[keep], w_a[keep]

        order = np.lexsort((w_a, dst_a, src_a))
        src_a, dst_a, w_a = src_a[order], dst_a[order], w_a[order]
        if src_a.size:
            # 排序后同一 (u, v) 的第一条即最小权值
            first = np.ones(src_a.size, dtype=bool)
            first[1:] = (src_a[1:] != src_a[:-1]) | (dst_a[1:] != dst_a[:-1])
            src_a, dst_a, w_a = src_a[first], dst_a[first], w_a[first]

        counts = np.bincount(src_a, minlength=n) if n else np.zeros(0, dtype=np.int64)
        rowptr = np.zeros(n + 1, dtype=ROWPTR_DTYPE)
        rowptr[1:] = np.cumsum(counts)
        return cls(n=n, rowptr=rowptr, col=dst_a, val=w_a)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_edges(n, [], [], [])

    # ------------------------------------------------------------------
    # 访问
    # ------------------------------------------------------------------

    @property
    def m(self) -> int:
        """边数"""
        return int(self.col.size)

    def sources(self) -> npt.NDArray[np.int64]:
        """每条边的源顶点（与 col 对齐）"""
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.rowptr.astype(np.int64)))

    def out_degree(self) -> npt.NDArray[np.int64]:
        return np.diff(self.rowptr.astype(np.int64))

    def neighbors(self, u: int) -> Tuple[npt.NDArray[np.uint32], npt.NDArray[np.uint32]]:
        """返回 u 的出边 (目标, 权值)"""
        if not 0 <= u < self.n:
            raise VertexRangeError("vertex out of range", details={"vertex": u, "n": self.n})
        lo, hi = int(self.rowptr[u]), int(self.rowptr[u + 1])
        return self.col[lo:hi], self.val[lo:hi]

    def edges(self) -> Iterator[Tuple[int, int, int]]:
        for u, v, w in zip(self.sources().tolist(), self.col.tolist(), self.val.tolist()):
            yield u, v, w

    def transpose(self) -> "Graph":
        """反向图"""
        return Graph.from_edges(self.n, self.col, self.sources(), self.val)

    def subgraph(self, vertices: Sequence[int]) -> "Graph":
        """诱导子图，顶点按 vertices 顺序重新编号"""
        idx = _check_subset(self.n, vertices)
        local = np.full(self.n, -1, dtype=np.int64)
        local[idx] = np.arange(idx.size)
        src = self.sources()
        keep = (local[src] >= 0) & (local[self.col.astype(np.int64)] >= 0)
        return Graph.from_edges(
            idx.size, local[src[keep]], local[self.col[keep].astype(np.int64)], self.val[keep]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.rowptr, other.rowptr)
            and np.array_equal(self.col, other.col)
            and np.array_equal(self.val, other.val)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _check_subset(n: int, vertices: Sequence[int]) -> npt.NDArray[np.int64]:
    idx = np.asarray(vertices, dtype=np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise VertexRangeError("subset vertex out of range", details={"n": n})
    if np.unique(idx).size != idx.size:
        raise ArgumentError("subset vertices must be distinct")
    return idx


def csr_to_dense(g: Graph, subset: Optional[Sequence[int]] = None) -> DistanceMatrix:
    """
    CSR 展开为稠密距离矩阵

    Args:
        g: 输入图
        subset: 可选顶点子集（决定行列顺序）；缺省为全部顶点

    Returns:
        对角线为0、边权为有限值、其余为INF的矩阵
    """
    if subset is None:
        idx = np.arange(g.n, dtype=np.int64)
    else:
        idx = _check_subset(g.n, subset)
    size = idx.size
    dense = np.full((size, size), INF, dtype=DIST_DTYPE)
    if size == 0:
        return dense

    local = np.full(g.n, -1, dtype=np.int64)
    local[idx] = np.arange(size)
    src = local[g.sources()]
    dst = local[g.col.astype(np.int64)]
    keep = (src >= 0) & (dst >= 0)
    dense[src[keep], dst[keep]] = g.val[keep]
    np.fill_diagonal(dense, 0)
    return dense


def dense_to_csr(d: npt.ArrayLike) -> Graph:
    """稠密矩阵压缩为CSR：保留所有有限的非对角元素"""
    mat = as_distance_matrix(d)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ArgumentError("distance matrix must be square", details={"shape": mat.shape})
    mask = mat != INF
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return Graph.from_edges(mat.shape[0], src, dst, mat[src, dst])


def csr_nbytes(n: int, m: int) -> int:
    """CSR占用字节数（rowptr u64 + col u32 + val u32）"""
    return 8 * (n + 1) + 8 * m
