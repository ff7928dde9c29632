"""
RAPID APSP - Floyd-Warshall 内核

- fw_classic: 经典三重循环（按主元 k 向量化）
- fw_remapped: 面板重映射版本，每个主元一次向量加、一次向量取小，随后循环置换
- fw_blocked: 分块三阶段版本，所有子内核都不超过一个tile

三者结果逐位相同。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import structlog

from rapid_apsp.graph.tropical import DistanceMatrix, as_distance_matrix, saturating_add
from rapid_apsp.kernels.min_plus import min_plus_product
from rapid_apsp.utils.error_handling import ArgumentError, PreconditionError

logger = structlog.get_logger(__name__)


@dataclass
class KernelStats:
    """内核统计：记录选择性写回（取小更新）次数"""

    updates: int = 0
    pivots: int = 0
    calls: int = 0

    def merge(self, other: "KernelStats") -> None:
        self.updates += other.updates
        self.pivots += other.pivots
        self.calls += other.calls


@dataclass(frozen=True)
class KernelCall:
    """分块FW中一次子内核调用的规模"""

    kind: str  # "fw" | "mp"
    rows: int
    inner: int
    cols: int
    updates: int


KernelCallback = Callable[[KernelCall], None]


def _check_fw_input(d: npt.ArrayLike) -> DistanceMatrix:
    mat = as_distance_matrix(d)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ArgumentError("Floyd-Warshall needs a square matrix", details={"shape": mat.shape})
    if mat.shape[0] and np.any(np.diagonal(mat) != 0):
        raise PreconditionError("diagonal must be zero before Floyd-Warshall")
    return mat


def _relax(block: DistanceMatrix, candidate: DistanceMatrix, stats: Optional[KernelStats]) -> None:
    if stats is not None:
        stats.updates += int(np.count_nonzero(candidate < block))
    np.minimum(block, candidate, out=block)


def fw_classic(
    d: npt.ArrayLike,
    *,
    inplace: bool = False,
    stats: Optional[KernelStats] = None,
) -> DistanceMatrix:
    """
    经典 Floyd-Warshall: D[i][j] = min(D[i][j], D[i][k] + D[k][j])

    对角线为0时主元行列在第k轮不变，因此按 k 整块向量化与逐元素三重循环等价。

    Args:
        d: 方阵，对角线为0
        inplace: 为 True 且输入已是 uint32 连续数组时直接原地更新
        stats: 可选统计对象（累计取小更新次数）

    Raises:
        PreconditionError: 对角线非0
    """
    mat = _check_fw_input(d)
    if not inplace or mat is not d:
        mat = mat.copy()
    n = mat.shape[0]
    for k in range(n):
        candidate = saturating_add(mat[:, k : k + 1], mat[k : k + 1, :])
        _relax(mat, candidate, stats)
    if stats is not None:
        stats.pivots += n
        stats.calls += 1
    return mat


@dataclass
class PanelLayout:
    """
    以主元为中心的面板布局

    panel_row[j] = D[pivot][index_map[j]]，panel_col[i] = D[index_map[i]][pivot]，
    main_block 为去掉主元行列后的 (n-1)×(n-1) 块。
    """

    pivot: int
    index_map: npt.NDArray[np.int64]
    panel_row: DistanceMatrix
    panel_col: DistanceMatrix
    main_block: DistanceMatrix
    pivot_value: int = 0

    @classmethod
    def extract(cls, d: DistanceMatrix, pivot: int) -> "PanelLayout":
        """
        按循环顺序 pivot+1, ..., pivot-1 抽取面板

        pivot 为0时返回视图（step 原地生效），否则为副本。
        """
        n = d.shape[0]
        if not 0 <= pivot < n:
            raise ArgumentError("pivot out of range", details={"pivot": pivot, "n": n})
        others = (pivot + 1 + np.arange(n - 1, dtype=np.int64)) % n
        if pivot == 0:
            return cls(
                pivot=0,
                index_map=others,
                panel_row=d[0, 1:],
                panel_col=d[1:, 0],
                main_block=d[1:, 1:],
                pivot_value=int(d[0, 0]),
            )
        return cls(
            pivot=pivot,
            index_map=others,
            panel_row=d[pivot, others],
            panel_col=d[others, pivot],
            main_block=d[np.ix_(others, others)],
            pivot_value=int(d[pivot, pivot]),
        )

    def step(self, stats: Optional[KernelStats] = None) -> None:
        """一次加法 + 一次取小，原地更新 main_block"""
        candidate = saturating_add(self.panel_col[:, None], self.panel_row[None, :])
        _relax(self.main_block, candidate, stats)

    def assemble(self) -> DistanceMatrix:
        """按原始编号重建完整矩阵"""
        n = self.index_map.size + 1
        full = np.empty((n, n), dtype=self.main_block.dtype)
        full[self.pivot, self.pivot] = self.pivot_value
        full[self.pivot, self.index_map] = self.panel_row
        full[self.index_map, self.pivot] = self.panel_col
        full[np.ix_(self.index_map, self.index_map)] = self.main_block
        return full


def fw_remapped(
    d: npt.ArrayLike,
    *,
    stats: Optional[KernelStats] = None,
) -> DistanceMatrix:
    """
    面板重映射 Floyd-Warshall

    工作矩阵始终把当前主元放在位置0：抽取 Panel_Row / Panel_Col，
    对 Main_Block 做一次加法和一次取小，再循环置换一位让下一个主元成为面板。
    面板本身不做主元传播（主元对角为0），它们在置换后重新进入主块时被更新。
    n 次置换后顺序回到原样。
    """
    mat = _check_fw_input(d)
    work = mat.copy()
    n = work.shape[0]
    for _ in range(n):
        PanelLayout.extract(work, 0).step(stats)
        work = np.roll(work, -1, axis=(0, 1))
    if stats is not None:
        stats.pivots += n
        stats.calls += 1
    return np.ascontiguousarray(work)


def block_ranges(sizes: Sequence[int]) -> List[Tuple[int, int]]:
    """由块大小序列得到连续区间 [lo, hi)"""
    ranges = []
    lo = 0
    for size in sizes:
        if size <= 0:
            raise ArgumentError("block sizes must be positive", details={"sizes": list(sizes)})
        ranges.append((lo, lo + size))
        lo += size
    return ranges


def fw_blocked(
    d: npt.ArrayLike,
    block_sizes: Sequence[int],
    *,
    stats: Optional[KernelStats] = None,
    on_kernel: Optional[KernelCallback] = None,
) -> DistanceMatrix:
    """
    分块三阶段 Floyd-Warshall

    对每个对角块 kb:
      1. 对角块内 FW
      2. 行面板 D[kb, j] 与列面板 D[i, kb] 与对角块做 min-plus
      3. 其余块 D[i, j] = min(D[i, j], D[i, kb] ⊗ D[kb, j])

    Args:
        block_sizes: 各块大小，和必须等于 n
        on_kernel: 每次子内核调用后的回调（用于执行轨迹）
    """
    mat = _check_fw_input(d).copy()
    n = mat.shape[0]
    if sum(block_sizes) != n:
        raise ArgumentError(
            "block sizes must sum to the matrix side", details={"n": n, "sum": int(sum(block_sizes))}
        )
    ranges = block_ranges(block_sizes)

    def emit(kind: str, rows: int, inner: int, cols: int, updates: int) -> None:
        if on_kernel is not None:
            on_kernel(KernelCall(kind=kind, rows=rows, inner=inner, cols=cols, updates=updates))

    def relax_tiles(
        product: DistanceMatrix,
        row_ranges: Sequence[Tuple[int, int]],
        col_ranges: Sequence[Tuple[int, int]],
        inner: int,
        row_base: int = 0,
        col_base: int = 0,
    ) -> None:
        # 乘积整体计算，写回与计数按 tile 进行；product 的 (0, 0) 对应 (row_base, col_base)
        for ilo, ihi in row_ranges:
            for jlo, jhi in col_ranges:
                local = KernelStats()
                part = product[ilo - row_base : ihi - row_base, jlo - col_base : jhi - col_base]
                _relax(mat[ilo:ihi, jlo:jhi], part, local)
                if stats is not None:
                    stats.updates += local.updates
                emit("mp", ihi - ilo, inner, jhi - jlo, local.updates)

    for klo, khi in ranges:
        kb = slice(klo, khi)
        width = khi - klo
        local = KernelStats()
        mat[kb, kb] = fw_classic(mat[kb, kb], stats=local)
        if stats is not None:
            stats.merge(local)
        emit("fw", width, width, width, local.updates)

        others = [r for r in ranges if r != (klo, khi)]
        if not others:
            continue
        diag = mat[kb, kb].copy()
        relax_tiles(min_plus_product(diag, mat[kb, :]), [(klo, khi)], others, width, row_base=klo)
        relax_tiles(min_plus_product(mat[:, kb], diag), others, [(klo, khi)], width, col_base=klo)
        relax_tiles(min_plus_product(mat[:, kb], mat[kb, :]), others, others, width)

    if stats is not None:
        stats.calls += 1
    return mat
