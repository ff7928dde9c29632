"""
RAPID APSP - 结果目录

目录结构:
    manifest.json                 层次形状、编号映射、配置回显
    trace.json                    执行轨迹
    level_{ℓ}/graph.csr           本层图
    level_{ℓ}/component_{c}.csr   分区最终距离（有限的非对角元素）
    level_{ℓ}/blocked.csr         分块顶层的完整距离
    level_{ℓ}/cross_{a}_{b}.csr   已物化的跨分区块，列编号偏移 |C_a|

读取后得到与求解时行为一致的 ApspResult；跨分区块仍按需合并。
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import structlog

from rapid_apsp.graph.csr import Graph, csr_to_dense, dense_to_csr
from rapid_apsp.graph.io import load_csr, save_csr
from rapid_apsp.graph.tropical import DistanceMatrix, inf_matrix
from rapid_apsp.models.artifacts import (
    ComponentManifest,
    LevelManifest,
    ResultManifest,
    read_artifact,
    write_artifact,
)
from rapid_apsp.partitioning.boundary import BoundaryGraph, Component
from rapid_apsp.partitioning.hierarchy import Level, LevelKind, PartitionHierarchy
from rapid_apsp.solver.config import SolverConfig
from rapid_apsp.solver.recursive_solver import ApspResult, LevelSolution
from rapid_apsp.solver.trace import ExecutionTrace
from rapid_apsp.utils.error_handling import SchemaError

logger = structlog.get_logger(__name__)

MANIFEST_FILE = "manifest.json"
TRACE_FILE = "trace.json"


def _embed_cross(block: DistanceMatrix) -> Graph:
    """rows × cols 块存为 (rows + cols) 个顶点的二部图"""
    rows, cols = block.shape
    square = inf_matrix(rows + cols, rows + cols)
    square[:rows, rows:] = block
    return dense_to_csr(square)


def _extract_cross(g: Graph, rows: int, cols: int) -> DistanceMatrix:
    if g.n != rows + cols:
        raise SchemaError("cross block file has the wrong size", details={"n": g.n, "expected": rows + cols})
    return csr_to_dense(g)[:rows, rows:].copy()


def save_result(result: ApspResult, directory: Union[str, Path]) -> Path:
    """把结果写入目录，返回清单路径"""
    root = Path(directory)
    levels: List[LevelManifest] = []
    for sol in result.solutions:
        level = sol.level
        rel = Path(f"level_{level.index}")
        save_csr(level.graph, root / rel / "graph.csr")

        comps: List[ComponentManifest] = []
        for comp, dist in zip(level.components, sol.distances):
            name = rel / f"component_{comp.index}.csr"
            save_csr(dense_to_csr(dist), root / name)
            comps.append(
                ComponentManifest(
                    index=comp.index,
                    size=comp.size,
                    boundary_count=comp.boundary_count,
                    vertices=comp.vertices.tolist(),
                    members=comp.members.tolist(),
                    file=name.as_posix(),
                )
            )

        blocked_file: Optional[str] = None
        if sol.blocked is not None:
            name = rel / "blocked.csr"
            save_csr(dense_to_csr(sol.blocked), root / name)
            blocked_file = name.as_posix()

        cross_files: Dict[str, str] = {}
        for c1, c2 in sol.cached_pairs:
            name = rel / f"cross_{c1}_{c2}.csr"
            save_csr(_embed_cross(sol.cross_block(c1, c2)), root / name)
            cross_files[f"{c1},{c2}"] = name.as_posix()

        levels.append(
            LevelManifest(
                index=level.index,
                kind=level.kind.value,
                vertices=level.n,
                edges=level.graph.m,
                graph_file=(rel / "graph.csr").as_posix(),
                global_ids=level.global_ids.tolist(),
                components=comps,
                blocked_file=blocked_file,
                cross_files=cross_files,
            )
        )

    write_artifact(result.trace, root / TRACE_FILE)
    manifest = ResultManifest(
        n=result.n,
        m=result.trace.m,
        tile_limit=result.hierarchy.tile_limit,
        top_within_tile=result.hierarchy.top_within_tile,
        levels=levels,
        trace_file=TRACE_FILE,
        config=result.trace.config,
        config_hash=result.trace.config_hash,
    )
    path = write_artifact(manifest, root / MANIFEST_FILE)
    logger.info("result_saved", path=str(root), levels=len(levels))
    return path


def _components(entry: LevelManifest) -> List[Component]:
    out = []
    for position, c in enumerate(entry.components):
        if c.index != position or len(c.vertices) != c.size or len(c.members) != c.size:
            raise SchemaError(
                "component entry is inconsistent",
                details={"level": entry.index, "component": c.index},
            )
        out.append(
            Component(
                level=entry.index,
                index=c.index,
                vertices=np.array(c.vertices, dtype=np.int64),
                members=np.array(c.members, dtype=np.int64),
                boundary_count=c.boundary_count,
            )
        )
    return out


def _boundary_graph(level_index: int, comps: List[Component], upper_graph: Graph) -> BoundaryGraph:
    counts = [c.boundary_count for c in comps]
    offsets = np.zeros(len(comps) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(counts)
    if int(offsets[-1]) != upper_graph.n:
        raise SchemaError(
            "boundary sizes do not match the next level",
            details={"level": level_index, "boundary": int(offsets[-1]), "next": upper_graph.n},
        )
    members = np.concatenate([c.boundary for c in comps]) if comps else np.zeros(0, np.int64)
    origin = np.zeros((members.size, 2), dtype=np.int64)
    for c in comps:
        lo, hi = offsets[c.index], offsets[c.index + 1]
        origin[lo:hi, 0] = c.index
        origin[lo:hi, 1] = np.arange(c.boundary_count)
    return BoundaryGraph(
        level=level_index, graph=upper_graph, origin_map=origin, offsets=offsets, members=members
    )


def load_result(directory: Union[str, Path]) -> ApspResult:
    """
    读回结果目录

    Raises:
        SchemaError: 清单版本或结构不符
        StorageError: 文件无法读取
    """
    root = Path(directory)
    manifest = read_artifact(root / MANIFEST_FILE, ResultManifest)
    trace = read_artifact(root / manifest.trace_file, ExecutionTrace)
    if not manifest.levels:
        raise SchemaError("manifest lists no levels", details={"path": str(root)})

    graphs = [load_csr(root / entry.graph_file) for entry in manifest.levels]
    levels: List[Level] = []
    finals: List[List[DistanceMatrix]] = []
    for i, entry in enumerate(manifest.levels):
        graph = graphs[i]
        if graph.n != entry.vertices or len(entry.global_ids) != graph.n:
            raise SchemaError("level graph does not match the manifest", details={"level": entry.index})
        comps = _components(entry)
        assignment = np.zeros(graph.n, dtype=np.int64)
        for c in comps:
            assignment[c.members] = c.index
        distances = [csr_to_dense(load_csr(root / c.file)) for c in entry.components]
        try:
            kind = LevelKind(entry.kind)
        except ValueError:
            raise SchemaError(f"unknown level kind {entry.kind!r}", details={"level": entry.index}) from None
        bg = None
        if kind == LevelKind.RECURSIVE:
            if i + 1 >= len(graphs):
                raise SchemaError("recursive level has no upper level", details={"level": entry.index})
            bg = _boundary_graph(entry.index, comps, graphs[i + 1])
        # 注入前的闭包不落盘，读回后以最终距离代替
        levels.append(
            Level(
                index=entry.index,
                kind=kind,
                graph=graph,
                global_ids=np.array(entry.global_ids, dtype=np.int64),
                assignment=assignment,
                components=tuple(comps),
                local_distances=tuple(distances),
                boundary_graph=bg,
            )
        )
        finals.append(distances)

    config = SolverConfig(**manifest.config)
    solutions: List[LevelSolution] = []
    upper: Optional[LevelSolution] = None
    for level, entry, distances in reversed(list(zip(levels, manifest.levels, finals))):
        blocked = csr_to_dense(load_csr(root / entry.blocked_file)) if entry.blocked_file else None
        sol = LevelSolution(
            level=level,
            distances=distances,
            upper=upper,
            blocked=blocked,
            materialize=config.materialize_cross and level.kind == LevelKind.RECURSIVE,
        )
        for key, file in entry.cross_files.items():
            c1, c2 = (int(x) for x in key.split(","))
            sol._cross[(c1, c2)] = _extract_cross(
                load_csr(root / file), level.components[c1].size, level.components[c2].size
            )
        solutions.insert(0, sol)
        upper = sol

    hierarchy = PartitionHierarchy(levels=tuple(levels), tile_limit=manifest.tile_limit)
    logger.info("result_loaded", path=str(root), n=manifest.n, depth=hierarchy.depth)
    return ApspResult(hierarchy=hierarchy, config=config, trace=trace, root=solutions[0], solutions=solutions)
