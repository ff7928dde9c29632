"""
RAPID APSP - 递归划分层次

第 ℓ 层: 划分本层图 → 各分区内 FW 闭包 → 构造边界图 → 边界图作为第 ℓ+1 层的图。
当本层图不超过 tile_limit 时成为顶层（单分区）；当边界集合占本层顶点的比例
超过 max_boundary_ratio（稠密图无法收缩）时，本层成为分块顶层，由分块 FW 求解。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import structlog

from rapid_apsp.graph.csr import Graph, csr_to_dense
from rapid_apsp.graph.tropical import DistanceMatrix
from rapid_apsp.kernels.floyd_warshall import fw_classic
from rapid_apsp.partitioning.boundary import BoundaryGraph, Component, boundary_mask, build_boundary_graph
from rapid_apsp.partitioning.multilevel import partition_kway
from rapid_apsp.utils.error_handling import ArgumentError, GraphFormatError, ParseError, StorageError

logger = structlog.get_logger(__name__)

KPolicy = Callable[[int, int], int]
# (层号, 本层图, 分区) -> 每个分区的闭包
ClosureFn = Callable[[int, Graph, Sequence[Component]], List[DistanceMatrix]]


class LevelKind(str, Enum):
    """层类型"""

    RECURSIVE = "recursive"  # 有边界图，上面还有一层
    TOP = "top"  # 单分区
    BLOCKED = "blocked"  # 边界无法收缩，分块 FW 求解


def default_k_policy(n: int, tile_limit: int) -> int:
    """k = ⌈n / tile_limit⌉"""
    return max(1, math.ceil(n / tile_limit))


def serial_closure(level: int, graph: Graph, components: Sequence[Component]) -> List[DistanceMatrix]:
    """逐个分区做经典 FW"""
    return [fw_classic(csr_to_dense(graph, c.members)) for c in components]


@dataclass(frozen=True, eq=False)
class Level:
    """
    一层划分

    Attributes:
        index: 层号 ℓ（0 为原图）
        kind: 层类型
        graph: 本层图（本层编号）
        global_ids: 本层编号 → 原图编号
        assignment: 本层编号 → 分区编号
        components: 分区，index 与列表位置一致
        local_distances: 各分区的初始闭包（注入前）
        boundary_graph: 仅 RECURSIVE 层有
    """

    index: int
    kind: LevelKind
    graph: Graph
    global_ids: npt.NDArray[np.int64]
    assignment: npt.NDArray[np.int64]
    components: Tuple[Component, ...]
    local_distances: Tuple[DistanceMatrix, ...]
    boundary_graph: Optional[BoundaryGraph] = None
    local_index: npt.NDArray[np.int64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        local = np.empty(self.graph.n, dtype=np.int64)
        for comp in self.components:
            local[comp.members] = np.arange(comp.size)
        object.__setattr__(self, "local_index", local)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def boundary_total(self) -> int:
        return sum(c.boundary_count for c in self.components)

    def locate(self, v: int) -> Tuple[int, int]:
        """本层顶点 → (分区编号, 分区内位置)"""
        return int(self.assignment[v]), int(self.local_index[v])

    def describe(self) -> Dict[str, object]:
        sizes = [c.size for c in self.components]
        return {
            "level": self.index,
            "kind": self.kind.value,
            "vertices": self.n,
            "edges": self.graph.m,
            "components": len(self.components),
            "max_component": max(sizes) if sizes else 0,
            "boundary": self.boundary_total,
            "boundary_sizes": [c.boundary_count for c in self.components],
        }


@dataclass(frozen=True, eq=False)
class PartitionHierarchy:
    """递归划分层次，levels[0] 为原图，levels[-1] 为顶层"""

    levels: Tuple[Level, ...]
    tile_limit: int

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> Level:
        return self.levels[-1]

    @property
    def n(self) -> int:
        return self.levels[0].n

    @property
    def top_within_tile(self) -> bool:
        """顶层整体能否装进一个 tile；BLOCKED 顶层可能超出，只保证每个分区不超出"""
        return self.top.n <= self.tile_limit

    def assignment(self, level: int = 0) -> npt.NDArray[np.int64]:
        return self.levels[level].assignment

    def describe(self) -> List[Dict[str, object]]:
        return [lvl.describe() for lvl in self.levels]


def _compact(assignment: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    """分区重新编号：按各分区最小顶点编号排序，去掉空分区"""
    if assignment.size == 0:
        return assignment.copy()
    _, first, inverse = np.unique(assignment, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inverse].astype(np.int64)


def _split_oversize(
    graph: Graph, assignment: npt.NDArray[np.int64], tile_limit: int, imbalance: float
) -> npt.NDArray[np.int64]:
    parts = _compact(assignment)
    n_parts = int(parts.max()) + 1 if parts.size else 0
    groups: List[npt.NDArray[np.int64]] = []

    def split(verts: npt.NDArray[np.int64]) -> None:
        if verts.size <= tile_limit:
            groups.append(verts)
            return
        halves = partition_kway(graph.subgraph(verts), 2, imbalance)
        split(verts[halves == 0])
        split(verts[halves == 1])

    resplit = 0
    for p in range(n_parts):
        verts = np.flatnonzero(parts == p).astype(np.int64)
        if verts.size > tile_limit:
            resplit += 1
        split(verts)
    if resplit:
        logger.debug("oversize_parts_resplit", parts=resplit, tile_limit=tile_limit)

    out = np.empty(graph.n, dtype=np.int64)
    for i, verts in enumerate(groups):
        out[verts] = i
    return _compact(out)


def make_components(
    graph: Graph,
    assignment: npt.NDArray[np.int64],
    level: int,
    global_ids: npt.NDArray[np.int64],
) -> Tuple[Component, ...]:
    """按分区收集顶点，边界在前，各自按编号升序"""
    n_parts = int(assignment.max()) + 1 if assignment.size else 0
    mask = boundary_mask(graph, assignment)
    order = np.lexsort((np.arange(graph.n), ~mask, assignment))
    counts = np.bincount(assignment, minlength=n_parts)
    b_counts = np.bincount(assignment[mask], minlength=n_parts)
    comps = []
    lo = 0
    for p in range(n_parts):
        members = order[lo : lo + counts[p]].astype(np.int64)
        lo += counts[p]
        comps.append(
            Component(
                level=level,
                index=p,
                vertices=global_ids[members],
                members=members,
                boundary_count=int(b_counts[p]),
            )
        )
    return tuple(comps)


def build_hierarchy(
    g: Graph,
    tile_limit: int = 1024,
    *,
    k_policy: KPolicy = default_k_policy,
    imbalance: float = 1.03,
    max_boundary_ratio: float = 0.9,
    assignment: Optional[npt.ArrayLike] = None,
    closure: Optional[ClosureFn] = None,
) -> PartitionHierarchy:
    """
    构建递归划分层次

    Args:
        g: 原图
        tile_limit: 每个分区（以及顶层）的最大顶点数
        k_policy: (本层顶点数, tile_limit) → 分区数
        assignment: 可选，外部导入的第 0 层划分
        closure: 计算分区闭包的函数；缺省为串行经典 FW

    Raises:
        ArgumentError: tile_limit < 2、max_boundary_ratio 不在 (0, 1] 内、导入划分长度不符
    """
    if tile_limit < 2:
        raise ArgumentError("tile_limit must be at least 2", details={"tile_limit": tile_limit})
    if not 0.0 < max_boundary_ratio <= 1.0:
        raise ArgumentError(
            "max_boundary_ratio must lie in (0, 1]", details={"max_boundary_ratio": max_boundary_ratio}
        )
    close = closure or serial_closure
    imported = None
    if assignment is not None:
        imported = np.asarray(assignment, dtype=np.int64).ravel()
        if imported.size != g.n or (imported.size and imported.min() < 0):
            raise ArgumentError(
                "imported assignment must give a non-negative part for every vertex",
                details={"n": g.n, "entries": imported.size},
            )

    levels: List[Level] = []
    graph = g
    global_ids = np.arange(g.n, dtype=np.int64)
    while True:
        index = len(levels)
        n = graph.n
        if n <= tile_limit and not (index == 0 and imported is not None):
            parts = np.zeros(n, dtype=np.int64)
            comps = make_components(graph, parts, index, global_ids) if n else ()
            level = Level(
                index=index,
                kind=LevelKind.TOP,
                graph=graph,
                global_ids=global_ids,
                assignment=parts,
                components=comps,
                local_distances=tuple(close(index, graph, comps)),
            )
            levels.append(level)
            break

        if index == 0 and imported is not None:
            parts = imported
        else:
            parts = partition_kway(graph, k_policy(n, tile_limit), imbalance)
        parts = _split_oversize(graph, parts, tile_limit, imbalance)
        comps = make_components(graph, parts, index, global_ids)
        local = tuple(close(index, graph, comps))
        nb = sum(c.boundary_count for c in comps)

        if nb > max_boundary_ratio * n or nb == n:
            level = Level(
                index=index,
                kind=LevelKind.BLOCKED,
                graph=graph,
                global_ids=global_ids,
                assignment=parts,
                components=comps,
                local_distances=local,
            )
            levels.append(level)
            logger.info(
                "boundary_stagnation",
                level=index,
                vertices=n,
                boundary=nb,
                ratio=round(nb / n, 4),
            )
            if n > tile_limit:
                logger.warning("top_exceeds_tile", level=index, vertices=n, tile_limit=tile_limit)
            break

        bg = build_boundary_graph(graph, comps, local, level=index)
        level = Level(
            index=index,
            kind=LevelKind.RECURSIVE,
            graph=graph,
            global_ids=global_ids,
            assignment=parts,
            components=comps,
            local_distances=local,
            boundary_graph=bg,
        )
        levels.append(level)
        logger.debug(
            "level_built",
            level=index,
            vertices=n,
            components=len(comps),
            boundary=nb,
        )
        graph = bg.graph
        global_ids = global_ids[bg.members]

    hierarchy = PartitionHierarchy(levels=tuple(levels), tile_limit=tile_limit)
    logger.info(
        "hierarchy_built",
        n=g.n,
        depth=hierarchy.depth,
        top_kind=hierarchy.top.kind.value,
        top_within_tile=hierarchy.top_within_tile,
        tile_limit=tile_limit,
    )
    return hierarchy


def save_assignment(assignment: npt.ArrayLike, path: Union[str, Path]) -> Path:
    """写划分文件：第 i 行为顶点 i 的分区编号"""
    parts = np.asarray(assignment, dtype=np.int64).ravel()
    target = Path(path)
    text = "".join(f"{int(p)}\n" for p in parts.tolist())
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="ascii")
    except OSError as e:
        raise StorageError(f"cannot write {target}: {e}", details={"path": str(target)}) from e
    return target


def load_assignment(path: Union[str, Path], n: Optional[int] = None) -> npt.NDArray[np.int64]:
    """读划分文件（METIS 输出格式），空行忽略"""
    source = Path(path)
    try:
        lines = source.read_text(encoding="ascii").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise StorageError(f"cannot read {source}: {e}", details={"path": str(source)}) from e

    parts: List[int] = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = int(text)
        except ValueError:
            raise ParseError(f"expected a part id, got {text!r}", line=lineno) from None
        if value < 0:
            raise ParseError("part ids must be non-negative", line=lineno)
        parts.append(value)

    if n is not None and len(parts) != n:
        raise GraphFormatError(
            "assignment length does not match the graph",
            details={"expected": n, "found": len(parts), "path": str(source)},
        )
    return np.array(parts, dtype=np.int64)
