"""
RAPID APSP - 命令行

把图生成、划分、求解、校验和模拟串成可复现的实验，产物为 CSV/JSON。

使用示例:
  rapid-apsp generate er --n 1000 --degree 25.25 --seed 7
  rapid-apsp generate nws --n 1000 --k 10 --p 0.1 --seed 7
  rapid-apsp solve graph.txt --tile-limit 64 --verify --sample 32
  rapid-apsp query runs/solve 3 17
  rapid-apsp simulate --topologies er,nws --sizes 256,512 --degrees 4,8 --seeds 0,1
  rapid-apsp report runs/sim/*.json --out merged.csv

环境变量:
  RAPID_DEVICE_CONFIG: 未给出 --device-config 时使用的器件文件
  RAPID_SOLVER__TILE_LIMIT 等: 求解器默认值
  RAPID_LOGGING__LEVEL / RAPID_LOGGING__JSON_LOGS: 日志
"""

from __future__ import annotations

import functools
import time
from enum import Enum
from pathlib import Path
from typing import Any, Callable, List, Optional, TypeVar

import structlog
import typer
from rich.console import Console
from rich.table import Table

from rapid_apsp import __version__
from rapid_apsp.config.settings import get_settings
from rapid_apsp.graph.csr import Graph
from rapid_apsp.graph.generators import gen_er, gen_nws
from rapid_apsp.graph.io import read_graph, write_graph
from rapid_apsp.graph.tropical import INF
from rapid_apsp.models.artifacts import LevelSummary, SimReport, SolveSummary, SweepRow, write_artifact
from rapid_apsp.partitioning.hierarchy import default_k_policy, load_assignment, save_assignment
from rapid_apsp.partitioning.multilevel import edge_cut, part_sizes, partition_kway
from rapid_apsp.simulator.dataflow import simulate_dataflow
from rapid_apsp.simulator.device import DeviceConfig, resolve_device_config
from rapid_apsp.simulator.report import merge_reports, report_text, sweep_frame, write_table
from rapid_apsp.solver.config import KernelChoice, SolverConfig
from rapid_apsp.solver.persistence import load_result, save_result
from rapid_apsp.solver.recursive_solver import ApspResult, solve_apsp
from rapid_apsp.solver.verifier import verify_against_oracle
from rapid_apsp.utils.error_handling import (
    EXIT_VERIFICATION_FAILED,
    ArgumentError,
    RapidGraphError,
    exit_code_for,
    handle_exceptions,
)
from rapid_apsp.utils.logging_setup import setup_logging

logger = structlog.get_logger(__name__)

app = typer.Typer(
    name="rapid-apsp",
    help="递归划分 APSP 求解器与 PCM 存内计算模型",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

F = TypeVar("F", bound=Callable[..., Any])


class Topology(str, Enum):
    ER = "er"
    NWS = "nws"


class GraphFormat(str, Enum):
    EDGELIST = "edgelist"
    CSR = "csr"


class TableFormat(str, Enum):
    CSV = "csv"
    MARKDOWN = "markdown"
    TEXT = "text"


def error_boundary(func: F) -> F:
    """记录异常并按异常类型退出"""
    tracked = handle_exceptions(logger=logger, passthrough=(typer.Exit, typer.Abort))(func)

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return tracked(*args, **kwargs)
        except (RapidGraphError, OSError) as e:
            err_console.print(f"[red]error:[/red] {e}")
            raise typer.Exit(code=exit_code_for(e)) from e

    return wrapper  # type: ignore[return-value]


def _parse_list(text: Optional[str], cast: Callable[[str], Any], name: str) -> List[Any]:
    if not text:
        return []
    try:
        return [cast(item.strip()) for item in text.split(",") if item.strip()]
    except ValueError:
        raise ArgumentError(f"cannot parse --{name} {text!r}", details={name: text}) from None


def _nws_k(degree: float) -> int:
    """与平均度数最接近的偶数 k"""
    return max(2, 2 * round(degree / 2))


def _generate(
    topology: Topology, n: int, seed: int, degree: Optional[float], k: Optional[int], p: float
) -> Graph:
    if topology == Topology.ER:
        if degree is None:
            raise ArgumentError("ER generation needs --degree")
        return gen_er(n, degree, seed)
    if k is None:
        k = _nws_k(degree) if degree is not None else 10
    return gen_nws(n, k, p, seed)


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="日志级别"),
    json_logs: Optional[bool] = typer.Option(None, "--json-logs/--no-json-logs", help="JSON 格式日志"),
) -> None:
    settings = get_settings().logging
    setup_logging(log_level or settings.level, settings.json_logs if json_logs is None else json_logs)


@app.command()
def version() -> None:
    """显示版本"""
    console.print(f"rapid-apsp {__version__}")


@app.command()
@error_boundary
def generate(
    topology: Topology = typer.Argument(..., help="er | nws"),
    n: int = typer.Option(..., "--n", help="顶点数"),
    seed: int = typer.Option(..., "--seed", help="随机种子"),
    degree: Optional[float] = typer.Option(None, "--degree", help="ER 平均出度"),
    k: Optional[int] = typer.Option(None, "--k", help="NWS 环形格点邻居数（偶数）"),
    p: float = typer.Option(0.1, "--p", help="NWS 捷径概率"),
    fmt: GraphFormat = typer.Option(GraphFormat.EDGELIST, "--format"),
    out: Optional[Path] = typer.Option(None, "--out", help="输出文件"),
) -> None:
    """生成合成图"""
    g = _generate(topology, n, seed, degree, k, p)
    suffix = "csr" if fmt == GraphFormat.CSR else "txt"
    target = out or get_settings().output_dir / f"{topology.value}_n{n}_s{seed}.{suffix}"
    write_graph(g, target, fmt.value)
    console.print(f"wrote {target} (n={g.n}, m={g.m})")


@app.command()
@error_boundary
def partition(
    graph: Path = typer.Argument(..., help="图文件"),
    k: Optional[int] = typer.Option(None, "--k", help="分区数；缺省由 tile_limit 决定"),
    tile_limit: Optional[int] = typer.Option(None, "--tile-limit"),
    imbalance: Optional[float] = typer.Option(None, "--imbalance"),
    out: Path = typer.Option(Path("assignment.txt"), "--out"),
) -> None:
    """导出第 0 层划分（每行一个分区编号）"""
    g = read_graph(graph)
    cfg = SolverConfig.from_settings(tile_limit=tile_limit, imbalance=imbalance)
    parts = k if k is not None else default_k_policy(g.n, cfg.tile_limit)
    assignment = partition_kway(g, parts, cfg.imbalance)
    save_assignment(assignment, out)
    sizes = part_sizes(assignment, parts)
    console.print(
        f"wrote {out}: k={parts}, cut={edge_cut(g, assignment)}, sizes {int(sizes.min())}..{int(sizes.max())}"
    )


def _summary(graph: Path, result: ApspResult, seconds: float) -> SolveSummary:
    return SolveSummary(
        config=result.trace.config,
        config_hash=result.trace.config_hash,
        graph=str(graph),
        n=result.n,
        m=result.trace.m,
        depth=result.hierarchy.depth,
        top_within_tile=result.hierarchy.top_within_tile,
        levels=[LevelSummary(**lvl) for lvl in result.hierarchy.describe()],
        wall_seconds=round(seconds, 6),
    )


def _print_levels(summary: SolveSummary) -> None:
    table = Table(title=f"{summary.graph}: n={summary.n} m={summary.m}")
    for col in ("level", "kind", "vertices", "edges", "components", "max", "boundary"):
        table.add_column(col, justify="right")
    for lvl in summary.levels:
        table.add_row(
            str(lvl.level),
            lvl.kind,
            str(lvl.vertices),
            str(lvl.edges),
            str(lvl.components),
            str(lvl.max_component),
            str(lvl.boundary),
        )
    console.print(table)
    if not summary.top_within_tile:
        top = summary.levels[-1]
        console.print(f"[yellow]top level has {top.vertices} vertices, over the tile limit[/yellow]")


@app.command()
@error_boundary
def solve(
    graph: Path = typer.Argument(..., help="图文件（边列表或二进制 CSR）"),
    tile_limit: Optional[int] = typer.Option(None, "--tile-limit"),
    workers: Optional[int] = typer.Option(None, "--workers"),
    kernel: Optional[KernelChoice] = typer.Option(None, "--kernel"),
    materialize: Optional[bool] = typer.Option(None, "--materialize/--no-materialize"),
    instrument: Optional[bool] = typer.Option(None, "--instrument/--no-instrument"),
    verify: bool = typer.Option(False, "--verify", help="用 Dijkstra 抽样校验"),
    sample: Optional[int] = typer.Option(None, "--sample"),
    seed: Optional[int] = typer.Option(None, "--seed", help="抽样种子"),
    assignment: Optional[Path] = typer.Option(None, "--assignment", help="导入第 0 层划分"),
    out: Optional[Path] = typer.Option(None, "--out", help="结果目录"),
) -> None:
    """求解 APSP 并写出结果目录与摘要"""
    g = read_graph(graph)
    cfg = SolverConfig.from_settings(
        tile_limit=tile_limit,
        workers=workers,
        kernel=kernel,
        materialize_cross=materialize,
        instrument=instrument,
        verify=verify,
        verify_sample=sample,
        verify_seed=seed,
        output_dir=out,
    )
    parts = load_assignment(assignment, g.n) if assignment is not None else None

    started = time.perf_counter()
    result = solve_apsp(g, cfg, assignment=parts)
    summary = _summary(graph, result, time.perf_counter() - started)

    passed = True
    if cfg.verify:
        report = verify_against_oracle(g, result, cfg.verify_sample, cfg.verify_seed)
        summary.verification = report.summary()
        passed = report.passed
        for mm in report.mismatches[:10]:
            err_console.print(f"mismatch {mm.source}->{mm.target}: expected {mm.expected}, got {mm.actual}")

    target = cfg.output_dir or get_settings().output_dir / "solve"
    save_result(result, target)
    write_artifact(summary, target / "summary.json")
    _print_levels(summary)
    console.print(f"wrote {target}")
    if not passed:
        err_console.print("[red]verification failed[/red]")
        raise typer.Exit(code=EXIT_VERIFICATION_FAILED)


@app.command()
@error_boundary
def query(
    result_dir: Path = typer.Argument(..., help="solve 写出的结果目录"),
    u: int = typer.Argument(...),
    v: int = typer.Argument(...),
) -> None:
    """查询一对顶点的最短距离"""
    result = load_result(result_dir)
    d = result.query(u, v)
    console.print("inf" if d == INF else str(d))


def _simulate_one(
    g: Graph,
    cfg: SolverConfig,
    device: DeviceConfig,
    pipelining: Optional[bool],
    static_power: Optional[bool],
    label: str,
) -> tuple[ApspResult, SimReport]:
    result = solve_apsp(g, cfg)
    report = simulate_dataflow(
        result.trace, device, pipelining=pipelining, include_static_power=static_power, label=label
    )
    return result, report


@app.command()
@error_boundary
def simulate(
    graph: Optional[Path] = typer.Option(None, "--graph", help="单个图文件；缺省时按扫描参数生成"),
    topologies: str = typer.Option("er", "--topologies", help="逗号分隔：er,nws"),
    sizes: str = typer.Option("256", "--sizes", help="逗号分隔的顶点数"),
    degrees: str = typer.Option("8", "--degrees", help="逗号分隔的平均度数"),
    seeds: str = typer.Option("0", "--seeds", help="逗号分隔的种子"),
    nws_p: float = typer.Option(0.05, "--nws-p"),
    tile_limit: Optional[int] = typer.Option(None, "--tile-limit"),
    workers: Optional[int] = typer.Option(None, "--workers"),
    instrument: Optional[bool] = typer.Option(None, "--instrument/--no-instrument"),
    device_config: Optional[Path] = typer.Option(None, "--device-config", help="TOML/JSON 器件文件"),
    pipelining: Optional[bool] = typer.Option(None, "--pipelining/--no-pipelining"),
    static_power: Optional[bool] = typer.Option(None, "--static-power/--no-static-power"),
    out: Optional[Path] = typer.Option(None, "--out", help="输出目录"),
) -> None:
    """在轨迹模式下求解并模拟硬件数据流"""
    device = resolve_device_config(device_config)
    cfg = SolverConfig.from_settings(tile_limit=tile_limit, workers=workers, instrument=instrument)
    target = out or get_settings().output_dir / "sim"

    if graph is not None:
        g = read_graph(graph)
        _, report = _simulate_one(g, cfg, device, pipelining, static_power, graph.stem)
        write_artifact(report, target / "report.json")
        text = report_text(report)
        (target / "report.txt").write_text(text, encoding="utf-8")
        console.print(text)
        return

    rows: List[SweepRow] = []
    for topo in _parse_list(topologies, Topology, "topologies"):
        for n in _parse_list(sizes, int, "sizes"):
            for degree in _parse_list(degrees, float, "degrees"):
                for seed in _parse_list(seeds, int, "seeds"):
                    g = _generate(topo, n, seed, degree, None, nws_p)
                    label = f"{topo.value}_n{n}_d{degree:g}_s{seed}"
                    result, report = _simulate_one(g, cfg, device, pipelining, static_power, label)
                    write_artifact(report, target / f"{label}.json")
                    by_stage = result.trace.bytes_by_stage()
                    rows.append(
                        SweepRow(
                            topology=topo.value,
                            n=n,
                            degree=degree,
                            seed=seed,
                            depth=result.hierarchy.depth,
                            boundary_level0=result.hierarchy.levels[0].boundary_total,
                            compute_cycles=report.compute_cycles,
                            compute_seconds=report.compute_seconds,
                            seconds=report.total_seconds,
                            joules=report.total_energy_j,
                            **{f"bytes_stage_{s}": by_stage[s] for s in range(1, 8)},
                            config_hash=report.config_hash,
                        )
                    )
    csv_path = write_table(sweep_frame(rows), target / "sweep.csv")
    console.print(f"wrote {len(rows)} sweep points to {csv_path}")


@app.command()
@error_boundary
def report(
    inputs: Optional[List[Path]] = typer.Argument(None, help="SimReport / 求解摘要 JSON"),
    out: Optional[Path] = typer.Option(None, "--out", help="输出表格文件"),
    fmt: TableFormat = typer.Option(TableFormat.CSV, "--format"),
) -> None:
    """合并多份报告为一张对比表"""
    df = merge_reports(inputs or [])
    if out is not None:
        write_table(df, out, fmt.value)
        console.print(f"wrote {out} ({len(df)} rows)")
        return
    table = Table()
    for col in df.columns:
        table.add_column(str(col))
    for row in df.itertuples(index=False):
        table.add_row(*("" if v is None or v != v else str(v) for v in row))
    console.print(table)


if __name__ == "__main__":
    app()
