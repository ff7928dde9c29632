"""
RAPID APSP - 产物数据模型

所有 JSON 产物（结果清单、求解摘要、模拟报告、扫描行）的 Pydantic 模型。
每个产物都带 schema_version、kind、tool_version 和完整的配置回显；
JSON 按键排序写出，相同输入得到逐字节相同的文件。
"""

from __future__ import annotations

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar, Union

from pydantic import BaseModel, Field, ValidationError

from rapid_apsp.utils.error_handling import SchemaError, StorageError

SCHEMA_VERSION = 1

M = TypeVar("M", bound="ArtifactHeader")


def tool_version() -> str:
    from rapid_apsp import __version__

    return f"rapid-apsp {__version__}"


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(config: Dict[str, Any]) -> str:
    """配置回显的 SHA-256"""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


class ArtifactKind(str, Enum):
    """产物类型"""

    RESULT_MANIFEST = "result_manifest"
    SOLVE_SUMMARY = "solve_summary"
    SIM_REPORT = "sim_report"
    EXECUTION_TRACE = "execution_trace"


class ArtifactHeader(BaseModel):
    """产物公共头"""

    schema_version: int = SCHEMA_VERSION
    kind: ArtifactKind
    tool_version: str = Field(default_factory=tool_version)
    config: Dict[str, Any] = Field(default_factory=dict, description="完整配置回显")
    config_hash: str = ""


# ----------------------------------------------------------------------
# 求解结果
# ----------------------------------------------------------------------


class ComponentManifest(BaseModel):
    """一个分区的持久化信息"""

    index: int
    size: int
    boundary_count: int
    vertices: List[int] = Field(description="原图编号，边界在前")
    members: List[int] = Field(description="本层编号，与 vertices 对应")
    file: str


class LevelManifest(BaseModel):
    """一层的持久化信息"""

    index: int
    kind: str
    vertices: int
    edges: int
    graph_file: str
    global_ids: List[int]
    components: List[ComponentManifest] = Field(default_factory=list)
    blocked_file: Optional[str] = None
    cross_files: Dict[str, str] = Field(default_factory=dict)


class ResultManifest(ArtifactHeader):
    """结果目录清单"""

    kind: ArtifactKind = ArtifactKind.RESULT_MANIFEST
    n: int
    m: int
    tile_limit: int
    top_within_tile: bool = True
    levels: List[LevelManifest]
    trace_file: str


class LevelSummary(BaseModel):
    level: int
    kind: str
    vertices: int
    edges: int
    components: int
    max_component: int
    boundary: int
    boundary_sizes: List[int]


class VerificationSummary(BaseModel):
    sources: int
    checked_pairs: int
    mismatches: int
    passed: bool


class SolveSummary(ArtifactHeader):
    """solve 命令的摘要"""

    kind: ArtifactKind = ArtifactKind.SOLVE_SUMMARY
    graph: str
    n: int
    m: int
    depth: int
    top_within_tile: bool = True
    levels: List[LevelSummary]
    wall_seconds: float
    verification: Optional[VerificationSummary] = None


# ----------------------------------------------------------------------
# 模拟报告
# ----------------------------------------------------------------------


class StageReport(BaseModel):
    """数据流的一个阶段"""

    stage: int = Field(ge=1, le=7)
    name: str
    tier: str
    bytes: int = Field(ge=0)
    seconds: float = Field(ge=0.0)
    energy_j: float = Field(ge=0.0)


class BlockReport(BaseModel):
    """硬件模块的累计开销"""

    name: str
    cycles: int = Field(ge=0)
    seconds: float = Field(ge=0.0)
    energy_j: float = Field(ge=0.0)


class CriticalPathEntry(BaseModel):
    """关键路径上的一组并行内核（同层同步骤）"""

    level: int
    step: int
    kernel: str
    kernels: int
    tiles: int
    cycles: int
    seconds: float


class DeviceHeader(BaseModel):
    """报告头中回显的器件常数"""

    clock_ns: float
    write_pulse_cycles: int
    write_energy_pj: float
    ucie_gbps: float


class SimReport(ArtifactHeader):
    """一次模拟的报告"""

    kind: ArtifactKind = ArtifactKind.SIM_REPORT
    label: str = ""
    placeholders: List[str] = Field(default_factory=list)
    device: DeviceHeader
    graph: Dict[str, Any] = Field(default_factory=dict)
    instrumented: bool = False
    update_probability: float
    stages: List[StageReport]
    blocks: List[BlockReport]
    critical_path: List[CriticalPathEntry]
    compute_cycles: int
    compute_seconds: float
    transfer_seconds: float
    overlap_seconds: float
    static_energy_j: float
    total_seconds: float
    total_energy_j: float
    cell_writes: int

    def stage(self, number: int) -> StageReport:
        return next(s for s in self.stages if s.stage == number)

    def block(self, name: str) -> BlockReport:
        return next(b for b in self.blocks if b.name == name)


class SweepRow(BaseModel):
    """扫描 CSV 的一行"""

    topology: str
    n: int
    degree: float
    seed: int
    depth: int
    boundary_level0: int
    compute_cycles: int
    compute_seconds: float
    seconds: float
    joules: float
    bytes_stage_1: int
    bytes_stage_2: int
    bytes_stage_3: int
    bytes_stage_4: int
    bytes_stage_5: int
    bytes_stage_6: int
    bytes_stage_7: int
    config_hash: str


# ----------------------------------------------------------------------
# 读写
# ----------------------------------------------------------------------


def dump_json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def write_artifact(model: BaseModel, path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(dump_json(model), encoding="utf-8")
    except OSError as e:
        raise StorageError(f"cannot write {target}: {e}", details={"path": str(target)}) from e
    return target


def load_raw_artifact(path: Union[str, Path]) -> Dict[str, Any]:
    """读取产物 JSON 并检查 schema_version"""
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except OSError as e:
        raise StorageError(f"cannot read {source}: {e}", details={"path": str(source)}) from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"{source} is not valid JSON: {e}", details={"path": str(source)}) from e
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError(f"{source} is not a rapid-apsp artifact", details={"path": str(source)})
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"{source} has schema version {version}, expected {SCHEMA_VERSION}",
            details={"path": str(source), "schema_version": version},
        )
    return data


def read_artifact(path: Union[str, Path], model: Type[M]) -> M:
    """读取并校验指定类型的产物"""
    data = load_raw_artifact(path)
    expected = model.model_fields["kind"].default
    if data["kind"] != getattr(expected, "value", expected):
        raise SchemaError(
            f"{path} holds a {data['kind']!r} artifact, expected {expected.value!r}",
            details={"path": str(path)},
        )
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise SchemaError(f"{path} does not match its schema: {e}", details={"path": str(path)}) from e
