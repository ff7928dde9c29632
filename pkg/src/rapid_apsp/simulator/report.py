"""
RAPID APSP - 报告输出

SimReport 的 JSON / 对齐文本输出，扫描结果 CSV，以及多份产物的合并对比表。
表格统一经 pandas DataFrame 生成。
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import pandas as pd
import structlog

from rapid_apsp.models.artifacts import (
    ArtifactKind,
    SimReport,
    SolveSummary,
    SweepRow,
    dump_json,
    load_raw_artifact,
)
from rapid_apsp.utils.error_handling import ArgumentError, SchemaError, StorageError

logger = structlog.get_logger(__name__)

SWEEP_COLUMNS: List[str] = list(SweepRow.model_fields)

MERGE_COLUMNS: List[str] = [
    "source",
    "kind",
    "label",
    "n",
    "m",
    "depth",
    "seconds",
    "joules",
    "compute_cycles",
    "cell_writes",
    "verified",
    "tool_version",
    "config_hash",
]


def report_json(report: SimReport) -> str:
    return dump_json(report)


def stage_frame(report: SimReport) -> pd.DataFrame:
    return pd.DataFrame([s.model_dump() for s in report.stages])


def block_frame(report: SimReport) -> pd.DataFrame:
    return pd.DataFrame([b.model_dump() for b in report.blocks])


def report_text(report: SimReport) -> str:
    """人读的对齐文本"""
    d = report.device
    lines = [
        f"rapid-apsp simulation {report.label}".rstrip(),
        f"tool: {report.tool_version}  config: {report.config_hash[:16]}",
        f"device: clock {d.clock_ns} ns, write pulse {d.write_pulse_cycles} cycles, "
        f"write energy {d.write_energy_pj} pJ, UCIe {d.ucie_gbps} Gb/s",
        f"placeholders: {', '.join(report.placeholders) or 'none'}",
        f"graph: n={report.graph.get('n')} m={report.graph.get('m')} depth={report.graph.get('depth')}",
        f"top within tile: {report.graph.get('top_within_tile', True)}",
        "",
        stage_frame(report).to_string(index=False, float_format="{:.6g}".format),
        "",
        block_frame(report).to_string(index=False, float_format="{:.6g}".format),
        "",
        f"compute: {report.compute_cycles} cycles, {report.compute_seconds:.6g} s",
        f"transfer: {report.transfer_seconds:.6g} s  overlap: {report.overlap_seconds:.6g} s",
        f"total: {report.total_seconds:.6g} s, {report.total_energy_j:.6g} J "
        f"(static {report.static_energy_j:.6g} J), cell writes {report.cell_writes}",
    ]
    return "\n".join(lines) + "\n"


def sweep_frame(rows: Iterable[SweepRow]) -> pd.DataFrame:
    """扫描结果，一个扫描点一行；没有数据时只有表头"""
    return pd.DataFrame([r.model_dump() for r in rows], columns=SWEEP_COLUMNS)


def _row(path: Path, data: Dict[str, Any]) -> Dict[str, Any]:
    kind = data["kind"]
    base = {
        "source": str(path),
        "kind": kind,
        "tool_version": data.get("tool_version", ""),
        "config_hash": data.get("config_hash", ""),
    }
    if kind == ArtifactKind.SIM_REPORT.value:
        report = SimReport.model_validate(data)
        base.update(
            label=report.label,
            n=report.graph.get("n"),
            m=report.graph.get("m"),
            depth=report.graph.get("depth"),
            seconds=report.total_seconds,
            joules=report.total_energy_j,
            compute_cycles=report.compute_cycles,
            cell_writes=report.cell_writes,
        )
    elif kind == ArtifactKind.SOLVE_SUMMARY.value:
        summary = SolveSummary.model_validate(data)
        base.update(
            label=summary.graph,
            n=summary.n,
            m=summary.m,
            depth=summary.depth,
            seconds=summary.wall_seconds,
            verified=summary.verification.passed if summary.verification else None,
        )
    else:
        raise SchemaError(
            f"{path} holds a {kind!r} artifact, which cannot be merged", details={"path": str(path)}
        )
    return base


def merge_reports(paths: Sequence[Union[str, Path]]) -> pd.DataFrame:
    """
    合并模拟报告与求解摘要为一张对比表

    Raises:
        SchemaError: schema_version 不符或产物类型不可合并
    """
    rows = []
    for p in paths:
        path = Path(p)
        data = load_raw_artifact(path)
        try:
            rows.append(_row(path, data))
        except ValueError as e:
            raise SchemaError(f"{path} does not match its schema: {e}", details={"path": str(path)}) from e
    logger.debug("reports_merged", inputs=len(rows))
    return pd.DataFrame(rows, columns=MERGE_COLUMNS)


def to_markdown(df: pd.DataFrame) -> str:
    header = "| " + " | ".join(str(c) for c in df.columns) + " |"
    rule = "|" + "|".join("---" for _ in df.columns) + "|"
    body = [
        "| " + " | ".join("" if pd.isna(v) else str(v) for v in row) + " |"
        for row in df.itertuples(index=False)
    ]
    return "\n".join([header, rule, *body]) + "\n"


def write_table(df: pd.DataFrame, path: Union[str, Path], fmt: str = "csv") -> Path:
    """写表格（csv | markdown | text）"""
    target = Path(path)
    if fmt == "csv":
        text = df.to_csv(index=False, lineterminator="\n")
    elif fmt == "markdown":
        text = to_markdown(df)
    elif fmt == "text":
        text = df.to_string(index=False) + "\n"
    else:
        raise ArgumentError(f"unknown table format {fmt!r}", details={"format": fmt})
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as e:
        raise StorageError(f"cannot write {target}: {e}", details={"path": str(target)}) from e
    return target
