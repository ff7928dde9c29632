"""
RAPID APSP - 边界顶点与边界图

边界顶点：至少有一条入边或出边的另一端落在其它分区。
边界图：顶点为各分区边界的拼接（分区顺序），边为
  (a) 原图中的跨分区边
  (b) 分区内任意有序边界对 (u, w) 的虚拟边，权值为分区内闭包距离
平行边取最小权值。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import numpy.typing as npt
import structlog

from rapid_apsp.graph.csr import Graph
from rapid_apsp.graph.tropical import INF, DistanceMatrix
from rapid_apsp.utils.error_handling import ArgumentError, ConsistencyError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Component:
    """
    某一层的一个分区

    Attributes:
        level: 所在层
        index: 分区编号
        vertices: 原图顶点编号，边界在前
        members: 本层图中的顶点编号，与 vertices 一一对应
        boundary_count: vertices 前 boundary_count 个为边界顶点
    """

    level: int
    index: int
    vertices: npt.NDArray[np.int64]
    members: npt.NDArray[np.int64]
    boundary_count: int

    @property
    def size(self) -> int:
        return int(self.members.size)

    @property
    def boundary(self) -> npt.NDArray[np.int64]:
        """边界顶点的本层编号"""
        return self.members[: self.boundary_count]

    @property
    def boundary_vertices(self) -> npt.NDArray[np.int64]:
        """边界顶点的原图编号"""
        return self.vertices[: self.boundary_count]

    @property
    def interior_count(self) -> int:
        return self.size - self.boundary_count


@dataclass(frozen=True, eq=False)
class BoundaryGraph:
    """
    第 level 层的边界图

    Attributes:
        graph: 边界图（顶点为拼接后的边界编号）
        origin_map: 每个边界图顶点的 (分区编号, 分区内位置)
        offsets: 分区 c 的边界占 [offsets[c], offsets[c+1])
        members: 每个边界图顶点在本层图中的编号
    """

    level: int
    graph: Graph
    origin_map: npt.NDArray[np.int64]
    offsets: npt.NDArray[np.int64]
    members: npt.NDArray[np.int64]

    @property
    def n(self) -> int:
        return self.graph.n

    def component_range(self, c: int) -> npt.NDArray[np.int64]:
        """分区 c 的边界在边界图中的编号"""
        return np.arange(self.offsets[c], self.offsets[c + 1], dtype=np.int64)


def boundary_mask(g: Graph, assignment: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """所有分区的边界顶点标记"""
    part = _check_assignment(g, assignment)
    src = g.sources()
    dst = g.col.astype(np.int64)
    cross = part[src] != part[dst]
    mask = np.zeros(g.n, dtype=bool)
    mask[src[cross]] = True
    mask[dst[cross]] = True
    return mask


def find_boundary(g: Graph, assignment: npt.ArrayLike, part: int) -> npt.NDArray[np.int64]:
    """
    分区 part 的边界顶点（升序）

    Raises:
        ArgumentError: part 不是有效的分区编号
    """
    parts = _check_assignment(g, assignment)
    n_parts = int(parts.max()) + 1 if parts.size else 0
    if not 0 <= part < n_parts:
        raise ArgumentError("invalid part id", details={"part": part, "parts": n_parts})
    mask = boundary_mask(g, parts)
    return np.flatnonzero(mask & (parts == part)).astype(np.int64)


def _check_assignment(g: Graph, assignment: npt.ArrayLike) -> npt.NDArray[np.int64]:
    part = np.asarray(assignment, dtype=np.int64).ravel()
    if part.size != g.n:
        raise ArgumentError(
            "assignment must cover every vertex", details={"n": g.n, "assignment": part.size}
        )
    if part.size and part.min() < 0:
        raise ArgumentError("part ids must be non-negative")
    return part


def build_boundary_graph(
    g: Graph,
    components: Sequence[Component],
    intra: Sequence[DistanceMatrix],
    level: int = 0,
) -> BoundaryGraph:
    """
    构造边界图

    Args:
        g: 本层图
        components: 本层分区（members 为本层编号，边界在前）
        intra: 每个分区的闭包距离矩阵（与 members 顺序一致）

    Raises:
        ConsistencyError: intra 的数量或尺寸与分区不符
    """
    if len(intra) != len(components):
        raise ConsistencyError(
            "one intra-component matrix per component is required",
            details={"components": len(components), "matrices": len(intra)},
        )
    counts = [c.boundary_count for c in components]
    offsets = np.zeros(len(components) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(counts)
    nb = int(offsets[-1])

    bg_id = np.full(g.n, -1, dtype=np.int64)
    members = np.empty(nb, dtype=np.int64)
    origin = np.empty((nb, 2), dtype=np.int64)
    src_parts: List[npt.NDArray[np.int64]] = []
    dst_parts: List[npt.NDArray[np.int64]] = []
    w_parts: List[npt.NDArray[np.int64]] = []

    for comp, dist, lo in zip(components, intra, offsets[:-1].tolist()):
        if dist.shape != (comp.size, comp.size):
            raise ConsistencyError(
                "intra-component matrix size does not match the component",
                details={"component": comp.index, "size": comp.size, "shape": dist.shape},
            )
        bc = comp.boundary_count
        ids = np.arange(lo, lo + bc, dtype=np.int64)
        bg_id[comp.boundary] = ids
        members[lo : lo + bc] = comp.boundary
        origin[lo : lo + bc, 0] = comp.index
        origin[lo : lo + bc, 1] = np.arange(bc)

        # 虚拟边：分区内有限距离的有序边界对
        block = dist[:bc, :bc]
        a, b = np.nonzero(block != INF)
        off_diag = a != b
        src_parts.append(ids[a[off_diag]])
        dst_parts.append(ids[b[off_diag]])
        w_parts.append(block[a[off_diag], b[off_diag]].astype(np.int64))

    # 跨分区边的两端都是边界顶点
    src = g.sources()
    dst = g.col.astype(np.int64)
    cross = (bg_id[src] >= 0) & (bg_id[dst] >= 0)
    part_of = np.full(g.n, -1, dtype=np.int64)
    for comp in components:
        part_of[comp.members] = comp.index
    cross &= part_of[src] != part_of[dst]
    src_parts.append(bg_id[src[cross]])
    dst_parts.append(bg_id[dst[cross]])
    w_parts.append(g.val[cross].astype(np.int64))

    graph = Graph.from_edges(
        nb, np.concatenate(src_parts), np.concatenate(dst_parts), np.concatenate(w_parts)
    )
    logger.debug(
        "boundary_graph_built",
        level=level,
        vertices=nb,
        edges=graph.m,
        cross_edges=int(np.count_nonzero(cross)),
    )
    return BoundaryGraph(level=level, graph=graph, origin_map=origin, offsets=offsets, members=members)
