"""
RAPID APSP - 热带半环标量运算

距离为32位无符号整数，INF = 2^32 - 1 为饱和哨兵值。
(Distance, min, saturating_add) 构成交换半环：加法单位元 INF，乘法单位元 0。
"""

from __future__ import annotations

from typing import Union

import numpy as np
import numpy.typing as npt

from rapid_apsp.utils.error_handling import ArgumentError

DIST_DTYPE = np.uint32
INF: int = int(np.iinfo(DIST_DTYPE).max)

DistanceMatrix = npt.NDArray[np.uint32]
ArrayLike = Union[int, npt.NDArray[np.integer]]


def saturating_add(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """
    饱和加法 min(a + b, INF)

    标量输入返回 int，数组输入按广播规则返回 uint32 数组。
    中间结果在 uint64 中计算，不会溢出。
    """
    if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
        a_i, b_i = int(a), int(b)
        if a_i >= INF or b_i >= INF:
            return INF
        return min(a_i + b_i, INF)

    total = np.asarray(a, dtype=np.uint64) + np.asarray(b, dtype=np.uint64)
    return np.minimum(total, np.uint64(INF)).astype(DIST_DTYPE)


def saturating_add3(a: ArrayLike, b: ArrayLike, c: ArrayLike) -> ArrayLike:
    """三项饱和加法；饱和满足结合律，求值顺序无关"""
    return saturating_add(saturating_add(a, b), c)


def tropical_min(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """半环加法（取最小值）"""
    if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
        return min(int(a), int(b))
    return np.minimum(np.asarray(a, dtype=DIST_DTYPE), np.asarray(b, dtype=DIST_DTYPE))


def tropical_identity(n: int) -> DistanceMatrix:
    """热带单位矩阵：对角线为0，其余为INF"""
    eye = np.full((n, n), INF, dtype=DIST_DTYPE)
    np.fill_diagonal(eye, 0)
    return eye


def inf_matrix(rows: int, cols: int) -> DistanceMatrix:
    return np.full((rows, cols), INF, dtype=DIST_DTYPE)


def as_distance_matrix(data: npt.ArrayLike) -> DistanceMatrix:
    """
    转换为 uint32 距离矩阵（C连续）

    负值或超出32位范围的输入会被拒绝。
    """
    arr = np.asarray(data)
    if arr.dtype != DIST_DTYPE:
        if arr.size and (arr.min() < 0 or arr.max() > INF):
            raise ArgumentError(
                "distance values must lie in [0, INF]",
                details={"min": int(arr.min()), "max": int(arr.max())},
            )
        arr = arr.astype(DIST_DTYPE)
    return np.ascontiguousarray(arr)
