"""
RAPID APSP 计算内核
"""

from rapid_apsp.kernels.floyd_warshall import (
    KernelCall,
    KernelStats,
    PanelLayout,
    block_ranges,
    fw_blocked,
    fw_classic,
    fw_remapped,
)
from rapid_apsp.kernels.min_plus import cross_merge, inject, min_plus_product, restrict

__all__ = [
    "KernelCall",
    "KernelStats",
    "PanelLayout",
    "block_ranges",
    "fw_blocked",
    "fw_classic",
    "fw_remapped",
    "cross_merge",
    "inject",
    "min_plus_product",
    "restrict",
]
