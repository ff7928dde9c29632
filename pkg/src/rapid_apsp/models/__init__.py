"""
RAPID APSP - 数据模型模块
"""

from rapid_apsp.models.artifacts import (
    SCHEMA_VERSION,
    ArtifactHeader,
    ArtifactKind,
    BlockReport,
    ComponentManifest,
    CriticalPathEntry,
    DeviceHeader,
    LevelManifest,
    LevelSummary,
    ResultManifest,
    SimReport,
    SolveSummary,
    StageReport,
    SweepRow,
    VerificationSummary,
    config_hash,
    dump_json,
    load_raw_artifact,
    read_artifact,
    tool_version,
    write_artifact,
)

__all__ = [
    "SCHEMA_VERSION",
    "ArtifactHeader",
    "ArtifactKind",
    "BlockReport",
    "ComponentManifest",
    "CriticalPathEntry",
    "DeviceHeader",
    "LevelManifest",
    "LevelSummary",
    "ResultManifest",
    "SimReport",
    "SolveSummary",
    "StageReport",
    "SweepRow",
    "VerificationSummary",
    "config_hash",
    "dump_json",
    "load_raw_artifact",
    "read_artifact",
    "tool_version",
    "write_artifact",
]
