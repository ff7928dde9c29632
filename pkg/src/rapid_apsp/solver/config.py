"""
RAPID APSP - 求解器配置
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from rapid_apsp.config.settings import SolverSettings, get_settings


class KernelChoice(str, Enum):
    """分区内 FW 使用的内核"""

    CLASSIC = "classic"
    REMAPPED = "remapped"


class SolverConfig(BaseModel):
    """
    一次求解的配置

    由 SolverSettings（环境变量 / .env）加上调用方覆盖项构成。
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tile_limit: int = Field(default=1024, ge=2)
    imbalance: float = Field(default=1.03, ge=1.0)
    workers: int = Field(default=1, ge=1, le=256)
    kernel: KernelChoice = KernelChoice.CLASSIC
    materialize_cross: bool = False
    instrument: bool = False
    max_boundary_ratio: float = Field(default=0.9, gt=0.0, le=1.0)
    verify: bool = False
    verify_sample: int = Field(default=32, ge=1)
    verify_seed: int = Field(default=0, ge=0)
    output_dir: Optional[Path] = None

    @classmethod
    def from_settings(cls, settings: Optional[SolverSettings] = None, **overrides: Any) -> "SolverConfig":
        """从配置读取默认值；值为 None 的覆盖项被忽略"""
        base = (settings or get_settings().solver).model_dump()
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def echo(self) -> Dict[str, Any]:
        """配置回显（不含输出路径）"""
        return self.model_dump(mode="json", exclude={"output_dir"})
