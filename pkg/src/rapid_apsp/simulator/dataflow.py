"""
RAPID APSP - 片间数据流模拟

输入求解器的执行轨迹与器件配置，输出报告：
  - 计算时间：按 (层, 步骤, 内核) 分组顺序执行，组内内核轮转分配到可用的片，
    组的耗时取最忙的片
  - 搬运时间：各阶段字节数 / 所在层级的带宽
  - 开启流水时，第 ③ 阶段的预取与 FW 计算重叠
模拟是 (轨迹, 配置) 的纯函数，单线程且确定。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import structlog

from rapid_apsp.models.artifacts import (
    BlockReport,
    CriticalPathEntry,
    DeviceHeader,
    SimReport,
    StageReport,
    config_hash,
)
from rapid_apsp.simulator.cost_model import (
    PJ,
    TileCost,
    calibrate_update_probability,
    simulate_fw_tile,
    simulate_mp_tile,
    transfer_seconds,
    zero_cost,
)
from rapid_apsp.simulator.device import DeviceConfig
from rapid_apsp.solver.trace import ExecutionTrace, KernelKind, KernelRecord, Stage
from rapid_apsp.utils.error_handling import ConsistencyError

logger = structlog.get_logger(__name__)

STAGE_NAMES: Dict[int, str] = {
    Stage.CSR_STREAM_IN: "csr_stream_in",
    Stage.FW_WRITEBACK: "fw_writeback",
    Stage.BOUNDARY_PREP: "boundary_prep",
    Stage.MP_FETCH: "mp_fetch",
    Stage.BOUNDARY_SYNC: "boundary_sync",
    Stage.RESULT_STORE: "result_store",
    Stage.BOUNDARY_FETCH: "boundary_fetch",
}

BLOCK_NAMES = ("fw_die", "mp_die", "permutation", "comparator", "interconnect")


@dataclass(frozen=True)
class Tier:
    name: str
    gbps: float
    pj_per_bit: float


def stage_tier(stage: int, cfg: DeviceConfig) -> Tier:
    """阶段 → 存储层级（①⑦ FeNAND 读，②–⑤ 经 UCIe 与 HBM3，⑥ FeNAND 写）"""
    if stage in (Stage.CSR_STREAM_IN, Stage.BOUNDARY_FETCH):
        return Tier("fenand_read", cfg.fenand_gbps, cfg.fenand_read_pj_per_bit)
    if stage == Stage.RESULT_STORE:
        return Tier("fenand_write", cfg.fenand_gbps, cfg.fenand_write_pj_per_bit)
    return Tier("ucie", min(cfg.ucie_gbps, cfg.hbm_gbps), cfg.ucie_pj_per_bit + cfg.hbm_pj_per_bit)


def _check(trace: ExecutionTrace, cfg: DeviceConfig) -> None:
    for rec in trace.kernels:
        if rec.kernel == KernelKind.FW and rec.rows > cfg.unit_rows:
            raise ConsistencyError(
                "trace holds an FW block larger than one PCM unit",
                details={"level": rec.level, "rows": rec.rows, "unit_rows": cfg.unit_rows},
            )
        if rec.kernel == KernelKind.MP and max(rec.inner, rec.inner2) > cfg.unit_cols:
            raise ConsistencyError(
                "trace holds a reduction wider than one PCM unit",
                details={"level": rec.level, "inner": max(rec.inner, rec.inner2), "unit_cols": cfg.unit_cols},
            )
        if trace.instrumented and rec.kernel == KernelKind.FW and rec.updates is None:
            raise ConsistencyError(
                "instrumented trace is missing update counts",
                details={"level": rec.level, "step": int(rec.step)},
            )


def _probability(trace: ExecutionTrace, cfg: DeviceConfig) -> float:
    if cfg.update_probability is not None:
        return cfg.update_probability
    if trace.instrumented:
        updates = 0
        slots = 0
        for rec in trace.kernels:
            if rec.kernel == KernelKind.FW and rec.updates is not None:
                updates += rec.updates
                slots += rec.rows * (rec.rows - 1) ** 2
        return updates / slots if slots else 0.0
    return calibrate_update_probability()


def kernel_cost(rec: KernelRecord, cfg: DeviceConfig, p: float) -> TileCost:
    """一条内核记录的片上开销"""
    if rec.kernel == KernelKind.FW:
        return simulate_fw_tile(rec.rows, cfg, rec.rows, updates=rec.updates, update_probability=p)
    if rec.stages == 1:
        # 分块 FW 中的单级乘积，输出 rows × cols 个字
        return simulate_mp_tile(rec.rows * rec.cols, rec.inner, cfg, stages=1, updates=rec.updates)
    # 两级合并：每个输出字先后经过 |B1| 与 |B2| 宽的归约
    stages = min(rec.stages, cfg.mp_stages)
    return simulate_mp_tile(
        rec.rows * rec.cols, max(rec.inner, rec.inner2), cfg, stages=stages, updates=rec.updates
    )


def makespan(cycles: List[int], tiles: int) -> int:
    """内核按顺序轮转分配到 tiles 个片，返回最忙片的周期数"""
    if not cycles:
        return 0
    load = [0] * min(tiles, len(cycles))
    for i, c in enumerate(cycles):
        load[i % len(load)] += c
    return max(load)


def simulate_dataflow(
    trace: ExecutionTrace,
    cfg: Optional[DeviceConfig] = None,
    *,
    pipelining: Optional[bool] = None,
    include_static_power: Optional[bool] = None,
    label: str = "",
) -> SimReport:
    """
    根据执行轨迹模拟完整数据流

    Raises:
        ConsistencyError: 轨迹中的块超出器件容量，或计数模式轨迹缺少更新数
    """
    from rapid_apsp.config.settings import get_settings

    cfg = cfg or DeviceConfig()
    sim = get_settings().simulator
    pipelining = sim.pipelining if pipelining is None else pipelining
    include_static_power = sim.include_static_power if include_static_power is None else include_static_power

    _check(trace, cfg)
    p = _probability(trace, cfg)

    # 计算
    fw_total = zero_cost(cfg)
    mp_total = zero_cost(cfg)
    critical: List[CriticalPathEntry] = []
    compute_cycles = 0
    fw_compute_cycles = 0
    for (level, step, kernel), records in trace.kernel_groups():
        costs = [kernel_cost(rec, cfg, p) for rec in records]
        tiles = cfg.fw_tiles if kernel == KernelKind.FW.value else cfg.mp_tiles
        span = makespan([c.cycles for c in costs], tiles)
        for c in costs:
            if kernel == KernelKind.FW.value:
                fw_total = fw_total + c
            else:
                mp_total = mp_total + c
        compute_cycles += span
        if kernel == KernelKind.FW.value:
            fw_compute_cycles += span
        critical.append(
            CriticalPathEntry(
                level=level,
                step=step,
                kernel=kernel,
                kernels=len(records),
                tiles=min(tiles, len(records)),
                cycles=span,
                seconds=cfg.seconds(span),
            )
        )

    # 搬运
    by_stage = trace.bytes_by_stage()
    stages: List[StageReport] = []
    for number in sorted(by_stage):
        tier = stage_tier(number, cfg)
        nbytes = by_stage[number]
        stages.append(
            StageReport(
                stage=number,
                name=STAGE_NAMES[number],
                tier=tier.name,
                bytes=nbytes,
                seconds=transfer_seconds(nbytes, tier.gbps),
                energy_j=nbytes * 8 * tier.pj_per_bit * PJ,
            )
        )
    transfer_s = sum(s.seconds for s in stages)
    transfer_j = sum(s.energy_j for s in stages)

    compute_s = cfg.seconds(compute_cycles)
    overlap = 0.0
    if pipelining:
        prefetch = next(s.seconds for s in stages if s.stage == Stage.BOUNDARY_PREP)
        overlap = min(prefetch, cfg.seconds(fw_compute_cycles))
    total_s = compute_s + transfer_s - overlap

    blocks = _blocks(cfg, fw_total, mp_total, transfer_s, transfer_j)
    static_j = 0.0
    if include_static_power:
        static_j = static_power_w(cfg) * total_s
    total_j = sum(b.energy_j for b in blocks) + static_j

    echo = {
        "device": cfg.echo(),
        "simulator": {"pipelining": pipelining, "include_static_power": include_static_power},
    }
    report = SimReport(
        config=echo,
        config_hash=config_hash(echo),
        label=label,
        placeholders=cfg.placeholder_fields(),
        device=DeviceHeader(
            clock_ns=cfg.clock_ns,
            write_pulse_cycles=cfg.write_pulse_cycles,
            write_energy_pj=cfg.write_energy_pj,
            ucie_gbps=cfg.ucie_gbps,
        ),
        graph={
            "n": trace.n,
            "m": trace.m,
            "depth": trace.depth,
            "tile_limit": trace.tile_limit,
            "top_within_tile": trace.top_within_tile,
            "solver_config_hash": trace.config_hash,
        },
        instrumented=trace.instrumented,
        update_probability=p,
        stages=stages,
        blocks=blocks,
        critical_path=critical,
        compute_cycles=compute_cycles,
        compute_seconds=compute_s,
        transfer_seconds=transfer_s,
        overlap_seconds=overlap,
        static_energy_j=static_j,
        total_seconds=total_s,
        total_energy_j=total_j,
        cell_writes=fw_total.cell_writes + mp_total.cell_writes,
    )
    logger.info(
        "dataflow_simulated",
        n=trace.n,
        compute_cycles=compute_cycles,
        seconds=total_s,
        joules=total_j,
        label=label or None,
    )
    return report


def static_power_w(cfg: DeviceConfig) -> float:
    """全部 PCM 单元与系统部件的静态功耗"""
    units = cfg.units_per_tile * (
        cfg.fw_tiles * cfg.fw_unit_power_mw + cfg.mp_tiles * cfg.mp_unit_power_mw
    )
    return units * 1e-3 + cfg.hbm_power_w + cfg.fenand_power_w + cfg.controller_power_w


def _blocks(
    cfg: DeviceConfig, fw: TileCost, mp: TileCost, transfer_s: float, transfer_j: float
) -> List[BlockReport]:
    def block(name: str, cycles: int, energy: float) -> BlockReport:
        return BlockReport(name=name, cycles=cycles, seconds=cfg.seconds(cycles), energy_j=energy)

    parts: Tuple[BlockReport, ...] = (
        block("fw_die", fw.array_cycles, fw.write_energy_j + fw.logic_energy_j),
        block("mp_die", mp.array_cycles, mp.write_energy_j + mp.logic_energy_j),
        block("permutation", fw.permutation_cycles, fw.dma_energy_j),
        block("comparator", mp.comparator_cycles, mp.comparator_energy_j),
        BlockReport(
            name="interconnect",
            cycles=round(transfer_s / cfg.clock_s),
            seconds=transfer_s,
            energy_j=transfer_j,
        ),
    )
    return list(parts)
