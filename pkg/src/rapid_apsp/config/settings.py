"""
RAPID APSP - 配置设置

使用Pydantic Settings进行配置管理，支持环境变量和 .env 文件。
环境变量前缀 RAPID_，嵌套分隔符 "__"，例如 RAPID_SOLVER__TILE_LIMIT=64。
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverSettings(BaseSettings):
    """递归求解器配置"""

    model_config = SettingsConfigDict(env_prefix="RAPID_SOLVER_", extra="ignore")

    tile_limit: int = Field(default=1024, ge=2, description="每个分区的最大顶点数")
    imbalance: float = Field(default=1.03, ge=1.0, description="k 路划分允许的不平衡系数")
    workers: int = Field(default=1, ge=1, le=256)
    kernel: str = Field(default="classic", pattern="^(classic|remapped)$")
    materialize_cross: bool = Field(default=False, description="是否预先计算全部跨分区块")
    instrument: bool = Field(default=False, description="统计取小更新次数")
    max_boundary_ratio: float = Field(default=0.9, gt=0.0, le=1.0)
    verify_sample: int = Field(default=32, ge=1)
    verify_seed: int = Field(default=0, ge=0)


class LoggingSettings(BaseSettings):
    """日志配置"""

    model_config = SettingsConfigDict(env_prefix="RAPID_LOGGING_", extra="ignore")

    level: str = Field(default="INFO", pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$")
    json_logs: bool = Field(default=False)


class SimulatorSettings(BaseSettings):
    """模拟器配置"""

    model_config = SettingsConfigDict(env_prefix="RAPID_SIMULATOR_", extra="ignore")

    pipelining: bool = Field(default=True, description="预取与计算重叠")
    include_static_power: bool = Field(default=False)


class Settings(BaseSettings):
    """主配置类"""

    model_config = SettingsConfigDict(
        env_prefix="RAPID_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_nested_delimiter="__",
        extra="ignore",
    )

    app_name: str = Field(default="rapid-apsp")
    output_dir: Path = Field(default=Path("runs"))
    # RAPID_DEVICE_CONFIG：命令行未给出 --device-config 时使用
    device_config: Optional[Path] = Field(default=None)

    solver: SolverSettings = Field(default_factory=SolverSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    simulator: SimulatorSettings = Field(default_factory=SimulatorSettings)


@lru_cache()
def get_settings() -> Settings:
    """获取配置实例（缓存）"""
    return Settings()
