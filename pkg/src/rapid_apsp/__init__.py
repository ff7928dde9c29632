"""
RAPID APSP

精确全源最短路径（APSP）的递归划分求解器，以及相变存储器（PCM）存内计算
硬件执行该调度时的周期/能耗参数化模型。

核心功能:
- CSR 图模型、文件格式与合成图生成
- 多级 k 路划分与递归边界层次
- Floyd-Warshall / min-plus 热带半环内核
- 递归求解、按需跨分区查询与 Dijkstra 校验
- 存内计算数据流模拟与扫描报告
"""

__version__ = "0.1.0"
__title__ = "RAPID APSP"
__description__ = "Recursive partitioned APSP with a processing-in-memory cost model"
__license__ = "MIT"

# 延迟导入核心组件，避免在包初始化时导入所有依赖
__all__ = [
    "Graph",
    "build_hierarchy",
    "solve_apsp",
    "ApspResult",
    "SolverConfig",
    "DeviceConfig",
    "simulate_dataflow",
]


def __getattr__(name):
    """延迟导入模块"""
    if name == "Graph":
        from rapid_apsp.graph.csr import Graph

        return Graph
    elif name == "build_hierarchy":
        from rapid_apsp.partitioning.hierarchy import build_hierarchy

        return build_hierarchy
    elif name == "solve_apsp":
        from rapid_apsp.solver.recursive_solver import solve_apsp

        return solve_apsp
    elif name == "ApspResult":
        from rapid_apsp.solver.recursive_solver import ApspResult

        return ApspResult
    elif name == "SolverConfig":
        from rapid_apsp.solver.config import SolverConfig

        return SolverConfig
    elif name == "DeviceConfig":
        from rapid_apsp.simulator.device import DeviceConfig

        return DeviceConfig
    elif name == "simulate_dataflow":
        from rapid_apsp.simulator.dataflow import simulate_dataflow

        return simulate_dataflow
    else:
        raise AttributeError(f"module '{__name__}' has no attribute '{name}'")
