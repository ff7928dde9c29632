"""
RAPID APSP 图划分：多级 k 路划分、边界提取与递归层次
"""

from rapid_apsp.partitioning.boundary import (
    BoundaryGraph,
    Component,
    boundary_mask,
    build_boundary_graph,
    find_boundary,
)
from rapid_apsp.partitioning.hierarchy import (
    Level,
    LevelKind,
    PartitionHierarchy,
    build_hierarchy,
    default_k_policy,
    load_assignment,
    save_assignment,
)
from rapid_apsp.partitioning.multilevel import edge_cut, part_sizes, partition_kway, symmetrize

__all__ = [
    "BoundaryGraph",
    "Component",
    "boundary_mask",
    "build_boundary_graph",
    "find_boundary",
    "Level",
    "LevelKind",
    "PartitionHierarchy",
    "build_hierarchy",
    "default_k_policy",
    "load_assignment",
    "save_assignment",
    "edge_cut",
    "part_sizes",
    "partition_kway",
    "symmetrize",
]
