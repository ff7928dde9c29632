"""
RAPID APSP - 递归划分求解器

自底向上:
  1. 各层分区内 FW（构建层次时完成）
  2. 顶层求解：单分区直接取闭包，分块顶层做分块 FW
自顶向下:
  3. 把上层的边界距离注入本层分区，重跑 FW
  4. 跨分区距离按需合并：D1[x, B1] ⊗ DB[B1, B2] ⊗ D2[B2, y]，DB 取自上层
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import numpy.typing as npt
import structlog

from rapid_apsp.graph.csr import Graph, csr_nbytes, csr_to_dense
from rapid_apsp.graph.tropical import INF, DistanceMatrix, inf_matrix
from rapid_apsp.kernels.floyd_warshall import KernelCall, KernelStats, fw_blocked, fw_classic, fw_remapped
from rapid_apsp.kernels.min_plus import cross_merge, inject
from rapid_apsp.models.artifacts import config_hash
from rapid_apsp.partitioning.boundary import Component
from rapid_apsp.partitioning.hierarchy import Level, LevelKind, PartitionHierarchy, build_hierarchy
from rapid_apsp.solver.config import KernelChoice, SolverConfig
from rapid_apsp.solver.trace import ExecutionTrace, KernelKind, KernelRecord, Stage, Step
from rapid_apsp.utils.error_handling import ArgumentError

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

WORD_BYTES = 4


def _dense_bytes(rows: int, cols: int) -> int:
    return WORD_BYTES * rows * cols


def _finite_offdiag(d: DistanceMatrix) -> int:
    finite = int(np.count_nonzero(d != INF))
    return finite - min(d.shape)


@dataclass(eq=False)
class LevelSolution:
    """
    一层的最终距离

    distances[c] 为分区 c 的精确距离（本层编号意义下），边界在前。
    跨分区块按需由上层边界距离合并得到。
    """

    level: Level
    distances: List[DistanceMatrix]
    upper: Optional["LevelSolution"] = None
    blocked: Optional[DistanceMatrix] = None
    materialize: bool = False
    _offsets: npt.NDArray[np.int64] = field(init=False, repr=False)
    _cross: Dict[Tuple[int, int], DistanceMatrix] = field(default_factory=dict, repr=False)
    _db: Dict[Tuple[int, int], DistanceMatrix] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        sizes = [c.size for c in self.level.components]
        offsets = np.zeros(len(sizes) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum(sizes)
        self._offsets = offsets

    @property
    def components(self) -> Tuple[Component, ...]:
        return self.level.components

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> DistanceMatrix:
        """本层编号 rows × cols 的距离块"""
        r = np.asarray(rows, dtype=np.int64).ravel()
        c = np.asarray(cols, dtype=np.int64).ravel()
        out = inf_matrix(r.size, c.size)
        if r.size == 0 or c.size == 0:
            return out
        r_comp = self.level.assignment[r]
        r_loc = self.level.local_index[r]
        c_comp = self.level.assignment[c]
        c_loc = self.level.local_index[c]
        for c1 in np.unique(r_comp).tolist():
            ri = np.flatnonzero(r_comp == c1)
            for c2 in np.unique(c_comp).tolist():
                ci = np.flatnonzero(c_comp == c2)
                out[np.ix_(ri, ci)] = self.pair_block(c1, c2, r_loc[ri], c_loc[ci])
        return out

    def pair_block(
        self,
        c1: int,
        c2: int,
        rows: Optional[npt.NDArray[np.int64]] = None,
        cols: Optional[npt.NDArray[np.int64]] = None,
    ) -> DistanceMatrix:
        """分区 c1 的本地行 × 分区 c2 的本地列"""
        size1 = self.components[c1].size
        size2 = self.components[c2].size
        lr = np.arange(size1) if rows is None else rows
        lc = np.arange(size2) if cols is None else cols
        if c1 == c2:
            return self.distances[c1][np.ix_(lr, lc)]
        if self.blocked is not None:
            return self.blocked[np.ix_(self._offsets[c1] + lr, self._offsets[c2] + lc)]
        if self.materialize:
            return self.cross_block(c1, c2)[np.ix_(lr, lc)]
        return self._merge(c1, c2, rows, cols)

    def cross_block(self, c1: int, c2: int) -> DistanceMatrix:
        """完整跨分区块（缓存）"""
        with self._lock:
            cached = self._cross.get((c1, c2))
        if cached is not None:
            return cached
        full = self._merge(c1, c2, None, None)
        with self._lock:
            self._cross.setdefault((c1, c2), full)
        return full

    def _merge(
        self,
        c1: int,
        c2: int,
        rows: Optional[npt.NDArray[np.int64]],
        cols: Optional[npt.NDArray[np.int64]],
    ) -> DistanceMatrix:
        bg = self.level.boundary_graph
        if bg is None or self.upper is None:
            raise ArgumentError(
                "cross-component block requested on a level without an upper level",
                details={"level": self.level.index, "pair": (c1, c2)},
            )
        ub1 = bg.component_range(c1)
        ub2 = bg.component_range(c2)
        db = self.boundary_block(c1, c2)
        return cross_merge(
            self.distances[c1],
            db,
            self.distances[c2],
            ub1,
            ub2,
            db_rows=ub1,
            db_cols=ub2,
            rows=rows,
            cols=cols,
        )

    def boundary_block(self, c1: int, c2: int) -> DistanceMatrix:
        """上层给出的 B_c1 × B_c2 边界距离（缓存）"""
        with self._lock:
            cached = self._db.get((c1, c2))
        if cached is not None:
            return cached
        bg = self.level.boundary_graph
        assert bg is not None and self.upper is not None
        db = self.upper.block(bg.component_range(c1), bg.component_range(c2))
        with self._lock:
            self._db.setdefault((c1, c2), db)
        return db

    def distance(self, u: int, v: int) -> int:
        """单个顶点对；跨分区时只对 u 这一行、v 这一列做一次 cross_merge"""
        c1, lu = self.level.locate(u)
        c2, lv = self.level.locate(v)
        one_row = np.array([lu], dtype=np.int64)
        one_col = np.array([lv], dtype=np.int64)
        return int(self.pair_block(c1, c2, one_row, one_col)[0, 0])

    @property
    def cached_pairs(self) -> List[Tuple[int, int]]:
        with self._lock:
            return sorted(self._cross)


@dataclass(eq=False)
class ApspResult:
    """
    可查询的 APSP 结果

    同一分区内的顶点对直接查表，跨分区的顶点对经一次 cross_merge 求值。
    """

    hierarchy: PartitionHierarchy
    config: SolverConfig
    trace: ExecutionTrace
    root: LevelSolution
    solutions: List[LevelSolution]

    @property
    def n(self) -> int:
        return self.hierarchy.n

    @property
    def component_distances(self) -> List[DistanceMatrix]:
        return self.root.distances

    @property
    def top_db(self) -> DistanceMatrix:
        """顶层的最终距离矩阵"""
        top = self.solutions[-1]
        if top.blocked is not None:
            return top.blocked
        return top.distances[0] if top.distances else inf_matrix(0, 0)

    def _check(self, v: int) -> int:
        if not 0 <= int(v) < self.n:
            raise ArgumentError("vertex out of range", details={"vertex": int(v), "n": self.n})
        return int(v)

    def query(self, u: int, v: int) -> int:
        u, v = self._check(u), self._check(v)
        return self.root.distance(u, v)

    def row(self, u: int) -> DistanceMatrix:
        u = self._check(u)
        return self.root.block([u], np.arange(self.n))[0]

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> DistanceMatrix:
        for v in list(rows) + list(cols):
            self._check(v)
        return self.root.block(rows, cols)

    def dense(self) -> DistanceMatrix:
        """完整 n×n 距离矩阵（仅适用于小图）"""
        everything = np.arange(self.n)
        return self.root.block(everything, everything)


def _map_ordered(workers: int, fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """按输入顺序收集结果，与 worker 数无关"""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


class _Runner:
    """把内核选择、计数和轨迹记录集中在一处"""

    def __init__(self, cfg: SolverConfig, trace: ExecutionTrace):
        self.cfg = cfg
        self.trace = trace
        self.kernel = fw_remapped if cfg.kernel == KernelChoice.REMAPPED else fw_classic

    def fw(self, d: DistanceMatrix) -> Tuple[DistanceMatrix, Optional[int]]:
        if not self.cfg.instrument:
            return self.kernel(d), None
        stats = KernelStats()
        out = self.kernel(d, stats=stats)
        return out, stats.updates

    def closure(self, level: int, graph: Graph, components: Sequence[Component]) -> List[DistanceMatrix]:
        """第 1 步：各分区内 FW"""

        def one(comp: Component) -> Tuple[DistanceMatrix, Optional[int]]:
            return self.fw(csr_to_dense(graph, comp.members))

        results = _map_ordered(self.cfg.workers, one, components)
        for comp, (dist, updates) in zip(components, results):
            sub_edges = graph.subgraph(comp.members).m
            self.trace.add_transfer(
                level, Stage.CSR_STREAM_IN, csr_nbytes(comp.size, sub_edges), "component csr"
            )
            self.trace.add_kernel(
                KernelRecord(
                    level=level,
                    step=Step.INTRA,
                    component=comp.index,
                    kernel=KernelKind.FW,
                    rows=comp.size,
                    inner=comp.size,
                    cols=comp.size,
                    updates=updates,
                )
            )
            self.trace.add_transfer(
                level, Stage.FW_WRITEBACK, _dense_bytes(comp.size, comp.size), "intra fw result"
            )
        logger.debug("intra_fw_done", level=level, components=len(components))
        return [dist for dist, _ in results]


def _solve_blocked(level: Level, runner: _Runner) -> LevelSolution:
    """分块顶层：以分区为 tile 做分块 FW"""
    members = np.zeros(0, np.int64)
    if level.components:
        members = np.concatenate([c.members for c in level.components])
    dense = csr_to_dense(level.graph, members)
    offset = 0
    # 对角块用第 1 步的闭包作为初值
    for comp, local in zip(level.components, level.local_distances):
        sl = slice(offset, offset + comp.size)
        dense[sl, sl] = np.minimum(dense[sl, sl], local)
        offset += comp.size

    calls: List[KernelCall] = []
    stats = KernelStats() if runner.cfg.instrument else None
    full = fw_blocked(dense, [c.size for c in level.components], stats=stats, on_kernel=calls.append)

    sizes = [c.size for c in level.components]
    bounds = np.cumsum([0] + sizes)
    for call in calls:
        runner.trace.add_kernel(
            KernelRecord(
                level=level.index,
                step=Step.BOUNDARY,
                component=-1,
                kernel=KernelKind(call.kind),
                rows=call.rows,
                inner=call.inner,
                cols=call.cols,
                stages=1,
                updates=call.updates if runner.cfg.instrument else None,
            )
        )
    runner.trace.add_transfer(
        level.index, Stage.BOUNDARY_PREP, csr_nbytes(level.n, level.graph.m), "blocked top csr"
    )
    runner.trace.add_transfer(
        level.index, Stage.FW_WRITEBACK, _dense_bytes(level.n, level.n), "blocked fw result"
    )

    distances = [full[bounds[i] : bounds[i + 1], bounds[i] : bounds[i + 1]].copy() for i in range(len(sizes))]
    return LevelSolution(level=level, distances=distances, blocked=full)


def _solve_level(level: Level, upper: LevelSolution, runner: _Runner) -> LevelSolution:
    """第 3 步：注入上层边界距离并重跑 FW"""
    bg = level.boundary_graph
    assert bg is not None

    def one(comp: Component) -> Tuple[DistanceMatrix, Optional[int]]:
        ub = bg.component_range(comp.index)
        db = upper.block(ub, ub)
        local = level.local_distances[comp.index]
        return runner.fw(inject(local, db, np.arange(comp.boundary_count)))

    results = _map_ordered(runner.cfg.workers, one, level.components)
    trace = runner.trace
    for comp, (_, updates) in zip(level.components, results):
        bc = comp.boundary_count
        trace.add_transfer(level.index, Stage.BOUNDARY_SYNC, _dense_bytes(bc, bc), "boundary inject")
        trace.add_transfer(
            level.index, Stage.BOUNDARY_PREP, _dense_bytes(comp.size, comp.size), "fw block prefetch"
        )
        trace.add_kernel(
            KernelRecord(
                level=level.index,
                step=Step.INJECT,
                component=comp.index,
                kernel=KernelKind.FW,
                rows=comp.size,
                inner=comp.size,
                cols=comp.size,
                updates=updates,
            )
        )
        trace.add_transfer(
            level.index, Stage.FW_WRITEBACK, _dense_bytes(comp.size, comp.size), "inject fw result"
        )
        trace.add_transfer(level.index, Stage.RESULT_STORE, _dense_bytes(bc, bc), "boundary matrix store")

    solution = LevelSolution(
        level=level,
        distances=[d for d, _ in results],
        upper=upper,
        materialize=runner.cfg.materialize_cross,
    )
    _record_cross(solution, runner)
    return solution


def _record_cross(solution: LevelSolution, runner: _Runner) -> None:
    """第 4 步：每个有序分区对一次两级 min-plus 合并"""
    level = solution.level
    comps = level.components
    pairs = [(a.index, b.index) for a in comps for b in comps if a.index != b.index]
    if runner.cfg.materialize_cross:
        _map_ordered(runner.cfg.workers, lambda p: solution.cross_block(*p), pairs)

    trace = runner.trace
    for c1, c2 in pairs:
        a, b = comps[c1], comps[c2]
        db_bytes = _dense_bytes(a.boundary_count, b.boundary_count)
        trace.add_transfer(level.index, Stage.BOUNDARY_FETCH, db_bytes, "boundary block")
        trace.add_transfer(
            level.index,
            Stage.MP_FETCH,
            _dense_bytes(a.size, a.boundary_count) + _dense_bytes(b.boundary_count, b.size),
            "cross operands",
        )
        trace.add_kernel(
            KernelRecord(
                level=level.index,
                step=Step.CROSS,
                component=c1,
                peer=c2,
                kernel=KernelKind.MP,
                rows=a.size,
                inner=a.boundary_count,
                inner2=b.boundary_count,
                cols=b.size,
                stages=2,
            )
        )
        if runner.cfg.materialize_cross:
            block = solution.cross_block(c1, c2)
            nnz = int(np.count_nonzero(block != INF))
        else:
            nnz = a.size * b.size
        trace.add_transfer(level.index, Stage.RESULT_STORE, 8 * (a.size + 1) + 8 * nnz, "cross result csr")


def solve_apsp(
    g: Graph,
    cfg: Optional[SolverConfig] = None,
    *,
    assignment: Optional[npt.ArrayLike] = None,
) -> ApspResult:
    """
    递归划分 APSP

    Args:
        g: 规范 CSR 图
        cfg: 求解配置；缺省取自环境配置
        assignment: 可选，外部导入的第 0 层划分

    Returns:
        可查询的精确结果，附带执行轨迹
    """
    cfg = cfg or SolverConfig.from_settings()
    started = time.perf_counter()
    echo = cfg.echo()
    trace = ExecutionTrace(
        n=g.n,
        m=g.m,
        tile_limit=cfg.tile_limit,
        instrumented=cfg.instrument,
        config=echo,
        config_hash=config_hash(echo),
    )
    runner = _Runner(cfg, trace)

    hierarchy = build_hierarchy(
        g,
        cfg.tile_limit,
        imbalance=cfg.imbalance,
        max_boundary_ratio=cfg.max_boundary_ratio,
        assignment=assignment,
        closure=runner.closure,
    )
    trace.depth = hierarchy.depth
    trace.top_within_tile = hierarchy.top_within_tile
    for level in hierarchy.levels:
        if level.boundary_graph is not None:
            bgg = level.boundary_graph.graph
            trace.add_transfer(level.index, Stage.BOUNDARY_PREP, csr_nbytes(bgg.n, bgg.m), "boundary graph")

    top = hierarchy.top
    if top.kind == LevelKind.BLOCKED:
        solutions = [_solve_blocked(top, runner)]
    else:
        solutions = [LevelSolution(level=top, distances=list(top.local_distances))]

    for level in reversed(hierarchy.levels[:-1]):
        solutions.insert(0, _solve_level(level, solutions[0], runner))

    root = solutions[0]
    for comp, dist in zip(root.components, root.distances):
        trace.add_transfer(
            0, Stage.RESULT_STORE, csr_nbytes(comp.size, _finite_offdiag(dist)), "intra result csr"
        )

    result = ApspResult(hierarchy=hierarchy, config=cfg, trace=trace, root=root, solutions=solutions)
    logger.info(
        "apsp_solved",
        n=g.n,
        m=g.m,
        depth=hierarchy.depth,
        top_kind=top.kind.value,
        top_within_tile=hierarchy.top_within_tile,
        components=len(root.components),
        seconds=round(time.perf_counter() - started, 4),
    )
    return result
