"""
RAPID APSP - min-plus 内核

min_plus_product 计算 C[i][j] = min_t A[i][t] + B[t][j]（饱和加法）。
restrict / inject 在层间搬运边界距离，cross_merge 为跨分区距离合并。
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt

from rapid_apsp.graph.tropical import DIST_DTYPE, INF, DistanceMatrix, as_distance_matrix
from rapid_apsp.utils.error_handling import ArgumentError, ConsistencyError

_CHUNK_ELEMENTS = 1 << 22


def _as_2d(name: str, x: npt.ArrayLike) -> DistanceMatrix:
    mat = as_distance_matrix(x)
    if mat.ndim != 2:
        raise ArgumentError(f"{name} must be two-dimensional", details={"shape": mat.shape})
    return mat


def min_plus_product(a: npt.ArrayLike, b: npt.ArrayLike) -> DistanceMatrix:
    """
    (min, +) 矩阵乘

    按内维分块广播求和再沿内维取小，每块的中间张量不超过 _CHUNK_ELEMENTS 个元素。

    Args:
        a: p×q
        b: q×r

    Returns:
        p×r；q = 0 时全为 INF
    """
    a_m = _as_2d("a", a)
    b_m = _as_2d("b", b)
    if a_m.shape[1] != b_m.shape[0]:
        raise ArgumentError(
            "inner dimensions differ", details={"a": a_m.shape, "b": b_m.shape}
        )
    p, q = a_m.shape
    r = b_m.shape[1]
    out = np.full((p, r), INF, dtype=np.uint64)
    if p == 0 or r == 0 or q == 0:
        return out.astype(DIST_DTYPE)

    a64 = a_m.astype(np.uint64)
    b64 = b_m.astype(np.uint64)
    step = max(1, _CHUNK_ELEMENTS // (p * r))
    for lo in range(0, q, step):
        hi = min(q, lo + step)
        # 两个 uint32 之和不会溢出 uint64，取小后再饱和即可
        total = a64[:, lo:hi, None] + b64[None, lo:hi, :]
        np.minimum(out, total.min(axis=1), out=out)
    np.minimum(out, np.uint64(INF), out=out)
    return out.astype(DIST_DTYPE)


def _index(n: int, idx: Sequence[int]) -> npt.NDArray[np.int64]:
    arr = np.asarray(idx, dtype=np.int64).ravel()
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ArgumentError("index out of range", details={"n": n})
    if np.unique(arr).size != arr.size:
        raise ArgumentError("indices must be distinct")
    return arr


def restrict(d: npt.ArrayLike, idx: Sequence[int]) -> DistanceMatrix:
    """取子矩阵 D[idx, idx]（按 idx 顺序）"""
    mat = _as_2d("d", d)
    sel = _index(mat.shape[0], idx)
    return mat[np.ix_(sel, sel)].copy()


def inject(
    d: npt.ArrayLike,
    db: npt.ArrayLike,
    idx: Sequence[int],
    *,
    inplace: bool = False,
) -> DistanceMatrix:
    """
    把上层边界距离写回: D[idx[a]][idx[b]] = min(D[...], DB[a][b])

    取小写回保证各项只减不增。
    """
    mat = _as_2d("d", d)
    block = _as_2d("db", db)
    sel = _index(mat.shape[0], idx)
    if block.shape != (sel.size, sel.size):
        raise ArgumentError(
            "boundary block does not match index list",
            details={"block": block.shape, "indices": sel.size},
        )
    if not inplace or mat is not d:
        mat = mat.copy()
    grid = np.ix_(sel, sel)
    mat[grid] = np.minimum(mat[grid], block)
    return mat


def _positions(ids: Sequence[int], lookup: Sequence[int], side: str) -> npt.NDArray[np.int64]:
    table = {int(v): i for i, v in enumerate(np.asarray(lookup).ravel().tolist())}
    missing = [int(v) for v in np.asarray(ids).ravel().tolist() if int(v) not in table]
    if missing:
        raise ConsistencyError(
            f"boundary vertices missing from the upper-level {side} index",
            details={"missing": missing[:8], "count": len(missing)},
        )
    return np.array([table[int(v)] for v in np.asarray(ids).ravel().tolist()], dtype=np.int64)


def cross_merge(
    d1: npt.ArrayLike,
    db: npt.ArrayLike,
    d2: npt.ArrayLike,
    b1: Sequence[int],
    b2: Sequence[int],
    db_rows: Sequence[int],
    db_cols: Optional[Sequence[int]] = None,
    rows: Optional[Sequence[int]] = None,
    cols: Optional[Sequence[int]] = None,
) -> DistanceMatrix:
    """
    跨分区合并: dist(x, y) = min_{b1, b2} D1[x][b1] + DB[b1][b2] + D2[b2][y]

    d1 / d2 为两个分区的闭包，顶点按“边界在前”排列，因此 d1 的前 |b1| 列
    对应 b1，d2 的前 |b2| 行对应 b2。db 以全局编号 db_rows × db_cols 索引。

    Args:
        b1, b2: 两侧边界的全局编号（与 d1 列 / d2 行的前缀对齐）
        db_rows, db_cols: db 的行列全局编号（db_cols 缺省同 db_rows）
        rows, cols: 可选，只计算 d1 的这些本地行与 d2 的这些本地列

    Raises:
        ConsistencyError: 边界顶点不在 db 的索引中
    """
    m1 = _as_2d("d1", d1)
    m2 = _as_2d("d2", d2)
    mb = _as_2d("db", db)
    n_b1, n_b2 = len(b1), len(b2)
    if n_b1 > m1.shape[1] or n_b2 > m2.shape[0]:
        raise ArgumentError(
            "boundary lists longer than the component closures",
            details={"b1": n_b1, "d1": m1.shape, "b2": n_b2, "d2": m2.shape},
        )
    col_index = db_rows if db_cols is None else db_cols
    if mb.shape != (len(db_rows), len(col_index)):
        raise ArgumentError(
            "upper-level block does not match its index lists",
            details={"db": mb.shape, "rows": len(db_rows), "cols": len(col_index)},
        )
    pos1 = _positions(b1, db_rows, "row")
    pos2 = _positions(b2, col_index, "column")

    left = m1[:, :n_b1] if rows is None else m1[np.asarray(rows, dtype=np.int64), :n_b1]
    right = m2[:n_b2, :] if cols is None else m2[:n_b2, np.asarray(cols, dtype=np.int64)]
    middle = mb[np.ix_(pos1, pos2)]
    return min_plus_product(min_plus_product(left, middle), right)
