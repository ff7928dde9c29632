"""
RAPID APSP - 单片开销模型

解析式的周期/能耗公式：
  - 位串行加法：每位 2 次 XOR + 1 次 minority + 1 次 NOT
  - 位串行取小：同样的逐位减法 + 1 个符号判定周期 + 条件写脉冲
  - 置换单元：按 burst_rows 行一组突发搬运，每组一次 DMA 读 + 一次 DMA 写
  - 比较树：1 个输入周期 + 每级 comparator_stage_cycles，级数 ⌈log_fanin(宽度)⌉
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple

import structlog

from rapid_apsp.simulator.device import DeviceConfig
from rapid_apsp.utils.error_handling import ArgumentError, CapacityError

logger = structlog.get_logger(__name__)

PJ = 1e-12

# 每位的原语次数（能耗用）
_ADD_PRIMITIVES = 4
_SUB_PRIMITIVES = 4


class BitSerialOp(str, Enum):
    ADD = "add"
    SUB_MIN = "sub_min"


def bit_serial_cost(op: BitSerialOp, cfg: DeviceConfig) -> int:
    """一次字并行运算的周期数（写脉冲按必然触发计入）"""
    per_bit = 2 * cfg.cycles_xor + cfg.cycles_minority + cfg.cycles_not
    add = cfg.bits * per_bit
    if BitSerialOp(op) == BitSerialOp.ADD:
        return add
    return add + 1 + cfg.write_pulse_cycles


def comparator_tree_cycles(width: int, cfg: DeviceConfig) -> int:
    """width 个字归约到最小值的周期数"""
    if width < 1:
        raise ArgumentError("comparator width must be at least 1", details={"width": width})
    stages = 0
    span = 1
    while span < width:
        span *= cfg.comparator_fanin
        stages += 1
    return 1 + cfg.comparator_stage_cycles * stages


def permutation_bursts(n: int, cfg: DeviceConfig) -> int:
    return -(-n // cfg.burst_rows)


def permutation_unit_cost(n: int, cfg: DeviceConfig) -> int:
    """边长 n 的块做一次面板置换的周期数"""
    if n < 1:
        raise ArgumentError("block side must be at least 1", details={"n": n})
    return permutation_bursts(n, cfg) * (cfg.dma_read_cycles + cfg.dma_write_cycles)


@dataclass(frozen=True)
class TileCost:
    """
    一次片上内核的开销

    cycles = array_cycles + permutation_cycles + comparator_cycles，
    能耗按写入、逻辑、DMA、比较树分别累计。
    """

    array_cycles: int = 0
    permutation_cycles: int = 0
    comparator_cycles: int = 0
    clock_ns: float = 2.0
    write_energy_j: float = 0.0
    logic_energy_j: float = 0.0
    dma_energy_j: float = 0.0
    comparator_energy_j: float = 0.0
    cell_writes: int = 0

    @property
    def cycles(self) -> int:
        return self.array_cycles + self.permutation_cycles + self.comparator_cycles

    @property
    def seconds(self) -> float:
        return self.cycles * self.clock_ns * 1e-9

    @property
    def energy_j(self) -> float:
        return self.write_energy_j + self.logic_energy_j + self.dma_energy_j + self.comparator_energy_j

    def __add__(self, other: "TileCost") -> "TileCost":
        return TileCost(
            array_cycles=self.array_cycles + other.array_cycles,
            permutation_cycles=self.permutation_cycles + other.permutation_cycles,
            comparator_cycles=self.comparator_cycles + other.comparator_cycles,
            clock_ns=self.clock_ns,
            write_energy_j=self.write_energy_j + other.write_energy_j,
            logic_energy_j=self.logic_energy_j + other.logic_energy_j,
            dma_energy_j=self.dma_energy_j + other.dma_energy_j,
            comparator_energy_j=self.comparator_energy_j + other.comparator_energy_j,
            cell_writes=self.cell_writes + other.cell_writes,
        )


def zero_cost(cfg: DeviceConfig) -> TileCost:
    return TileCost(clock_ns=cfg.clock_ns)


def _write_energy(writes: int, cfg: DeviceConfig) -> float:
    # 一次字写入对字内全部比特单元编程
    return writes * cfg.bits * cfg.write_energy_pj * PJ


def simulate_fw_tile(
    n: int,
    cfg: DeviceConfig,
    pivots: Optional[int] = None,
    *,
    updates: Optional[int] = None,
    update_probability: Optional[float] = None,
) -> TileCost:
    """
    一个 n×n 块上的 FW

    每个主元：一次向量加、一次向量取小、一次面板置换。
    n == 1 时主块为空，只剩置换。
    cell_writes 优先取计数模式的实际更新数，否则按更新概率估计。

    Raises:
        CapacityError: n 超过单元行数
        ArgumentError: pivots 超过 n
    """
    if n > cfg.unit_rows:
        raise CapacityError(
            "block does not fit one PCM unit", details={"n": n, "unit_rows": cfg.unit_rows}
        )
    pivots = n if pivots is None else pivots
    if pivots < 0 or pivots > n:
        raise ArgumentError("pivots must lie in [0, n]", details={"n": n, "pivots": pivots})
    if n == 0 or pivots == 0:
        return zero_cost(cfg)

    main = (n - 1) ** 2
    array = 0
    if main:
        array = pivots * (bit_serial_cost(BitSerialOp.ADD, cfg) + bit_serial_cost(BitSerialOp.SUB_MIN, cfg))
    perm = pivots * permutation_unit_cost(n, cfg)

    if updates is not None:
        writes = int(updates)
    else:
        p = 0.0 if update_probability is None else update_probability
        writes = int(round(p * pivots * main))

    return TileCost(
        array_cycles=array,
        permutation_cycles=perm,
        clock_ns=cfg.clock_ns,
        write_energy_j=_write_energy(writes, cfg),
        logic_energy_j=pivots * main * cfg.bits * (_ADD_PRIMITIVES + _SUB_PRIMITIVES) * cfg.logic_op_pj * PJ,
        dma_energy_j=pivots * permutation_bursts(n, cfg) * cfg.dma_burst_pj * PJ,
        cell_writes=writes,
    )


def simulate_mp_tile(
    rows: int,
    inner: int,
    cfg: DeviceConfig,
    *,
    stages: int = 2,
    updates: Optional[int] = None,
) -> TileCost:
    """
    min-plus 归约：每个输出字一次向量加和一次比较树归约，共 stages 级

    rows 为输出字数；每个输出写一次（计数模式下取实际更新数）。

    Raises:
        CapacityError: inner 超过单元列数
    """
    if inner > cfg.unit_cols:
        raise CapacityError(
            "reduction width does not fit one PCM unit", details={"inner": inner, "unit_cols": cfg.unit_cols}
        )
    if stages < 1:
        raise ArgumentError("stages must be at least 1", details={"stages": stages})
    if rows <= 0 or inner <= 0:
        return zero_cost(cfg)

    passes = rows * stages
    writes = rows if updates is None else int(updates)
    return TileCost(
        array_cycles=passes * bit_serial_cost(BitSerialOp.ADD, cfg),
        comparator_cycles=passes * comparator_tree_cycles(inner, cfg),
        clock_ns=cfg.clock_ns,
        write_energy_j=_write_energy(writes, cfg),
        logic_energy_j=passes * inner * cfg.bits * _ADD_PRIMITIVES * cfg.logic_op_pj * PJ,
        comparator_energy_j=passes * cfg.comparator_pj * PJ,
        cell_writes=writes,
    )


def transfer_seconds(nbytes: int, gbps: float) -> float:
    """nbytes 字节在 gbps 链路上的传输时间"""
    if nbytes < 0:
        raise ArgumentError("byte count must be non-negative", details={"nbytes": nbytes})
    return nbytes * 8 / (gbps * 1e9)


CALIBRATION_N = 64
CALIBRATION_DEGREE = 8.0
CALIBRATION_SEEDS: Tuple[int, ...] = (0, 1, 2, 3)


@lru_cache(maxsize=8)
def calibrate_update_probability(
    n: int = CALIBRATION_N,
    degree: float = CALIBRATION_DEGREE,
    seeds: Tuple[int, ...] = CALIBRATION_SEEDS,
) -> float:
    """
    在小规模 ER 图上运行计数模式的 FW，得到主块元素被更新的平均比例
    """
    from rapid_apsp.graph.csr import csr_to_dense
    from rapid_apsp.graph.generators import gen_er
    from rapid_apsp.kernels.floyd_warshall import KernelStats, fw_classic

    if n < 2:
        raise ArgumentError("calibration needs at least two vertices", details={"n": n})
    updates = 0
    slots = 0
    for seed in seeds:
        stats = KernelStats()
        fw_classic(csr_to_dense(gen_er(n, degree, seed)), stats=stats)
        updates += stats.updates
        slots += n * (n - 1) ** 2
    p = updates / slots if slots else 0.0
    logger.debug("update_probability_calibrated", n=n, degree=degree, seeds=len(seeds), p=round(p, 6))
    return p
