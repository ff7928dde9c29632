"""
RAPID APSP - 结果校验

用独立实现的 Dijkstra（二叉堆）作为基准，对随机抽取的源点比较整行距离。
不一致属于数据而不是错误：返回不一致列表，由调用方决定退出码。
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import List

import numpy as np
import structlog

from rapid_apsp.graph.csr import Graph
from rapid_apsp.graph.tropical import DIST_DTYPE, INF, DistanceMatrix
from rapid_apsp.models.artifacts import VerificationSummary
from rapid_apsp.solver.recursive_solver import ApspResult
from rapid_apsp.utils.error_handling import ArgumentError, VertexRangeError

logger = structlog.get_logger(__name__)


def dijkstra(g: Graph, source: int) -> DistanceMatrix:
    """单源最短路（非负权），不可达为 INF"""
    if not 0 <= source < g.n:
        raise VertexRangeError("source out of range", details={"source": source, "n": g.n})
    dist = [INF] * g.n
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        targets, weights = g.neighbors(u)
        for v, w in zip(targets.tolist(), weights.tolist()):
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return np.minimum(np.array(dist, dtype=np.uint64), INF).astype(DIST_DTYPE)


@dataclass(frozen=True)
class Mismatch:
    source: int
    target: int
    expected: int
    actual: int


@dataclass
class VerificationReport:
    """校验结果"""

    sources: List[int]
    checked_pairs: int
    mismatches: List[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def summary(self) -> VerificationSummary:
        return VerificationSummary(
            sources=len(self.sources),
            checked_pairs=self.checked_pairs,
            mismatches=len(self.mismatches),
            passed=self.passed,
        )


def choose_sources(n: int, sample: int, seed: int) -> List[int]:
    """sample >= n 时取全部顶点，否则按种子无放回抽样（升序）"""
    if sample >= n:
        return list(range(n))
    rng = np.random.default_rng(seed)
    return sorted(int(x) for x in rng.choice(n, size=sample, replace=False))


def verify_against_oracle(
    g: Graph,
    result: ApspResult,
    sample: int = 32,
    seed: int = 0,
    *,
    max_reported: int = 100,
) -> VerificationReport:
    """
    对 sample 个源点运行 Dijkstra 并与结果逐项比较

    Raises:
        ArgumentError: sample < 1 或图与结果规模不符
    """
    if sample < 1:
        raise ArgumentError("sample must be at least 1", details={"sample": sample})
    if g.n != result.n:
        raise ArgumentError("graph and result sizes differ", details={"graph": g.n, "result": result.n})

    sources = choose_sources(g.n, sample, seed)
    report = VerificationReport(sources=sources, checked_pairs=0)
    total_bad = 0
    for u in sources:
        expected = dijkstra(g, u)
        actual = result.row(u)
        report.checked_pairs += g.n
        bad = np.flatnonzero(expected != actual)
        total_bad += bad.size
        for v in bad.tolist():
            if len(report.mismatches) >= max_reported:
                break
            report.mismatches.append(
                Mismatch(source=u, target=v, expected=int(expected[v]), actual=int(actual[v]))
            )

    log = logger.info if report.passed else logger.warning
    log(
        "verification_done",
        sources=len(sources),
        checked_pairs=report.checked_pairs,
        mismatches=total_bad,
    )
    return report
