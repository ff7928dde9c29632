"""
递归划分求解器
"""

from rapid_apsp.solver.config import KernelChoice, SolverConfig
from rapid_apsp.solver.persistence import load_result, save_result
from rapid_apsp.solver.recursive_solver import ApspResult, LevelSolution, solve_apsp
from rapid_apsp.solver.trace import ExecutionTrace, KernelKind, KernelRecord, Stage, Step, TransferRecord
from rapid_apsp.solver.verifier import Mismatch, VerificationReport, dijkstra, verify_against_oracle

__all__ = [
    "ApspResult",
    "ExecutionTrace",
    "KernelChoice",
    "KernelKind",
    "KernelRecord",
    "LevelSolution",
    "Mismatch",
    "SolverConfig",
    "Stage",
    "Step",
    "TransferRecord",
    "VerificationReport",
    "dijkstra",
    "load_result",
    "save_result",
    "solve_apsp",
    "verify_against_oracle",
]
