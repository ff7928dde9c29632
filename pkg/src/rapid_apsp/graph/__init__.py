"""
RAPID APSP - 图核心模块

图数据模型、文件读写、合成生成器、CSR与稠密矩阵互转以及热带标量运算。
"""

from rapid_apsp.graph.csr import Graph, csr_nbytes, csr_to_dense, dense_to_csr
from rapid_apsp.graph.generators import gen_er, gen_nws
from rapid_apsp.graph.io import (
    dump_csr,
    dump_edge_list,
    load_csr,
    load_edge_list,
    parse_csr,
    read_graph,
    save_csr,
    write_graph,
)
from rapid_apsp.graph.tropical import (
    DIST_DTYPE,
    INF,
    DistanceMatrix,
    as_distance_matrix,
    saturating_add,
    saturating_add3,
    tropical_identity,
)

__all__ = [
    "Graph",
    "DistanceMatrix",
    "DIST_DTYPE",
    "INF",
    "as_distance_matrix",
    "csr_nbytes",
    "csr_to_dense",
    "dense_to_csr",
    "dump_csr",
    "dump_edge_list",
    "gen_er",
    "gen_nws",
    "load_csr",
    "load_edge_list",
    "parse_csr",
    "read_graph",
    "saturating_add",
    "saturating_add3",
    "save_csr",
    "tropical_identity",
    "write_graph",
]
