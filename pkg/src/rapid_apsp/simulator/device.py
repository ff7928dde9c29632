"""
RAPID APSP - 器件配置

PCM 存内计算硬件的全部可调参数。时钟、写脉冲、写能量和 UCIe 带宽有实测值；
HBM3 / FeNAND 的带宽与能耗、逻辑与 DMA 的能耗没有公开数值，默认值只是占位，
仍处于占位值的字段会在每份报告头中列出。
"""

from __future__ import annotations

import json
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from rapid_apsp.models.artifacts import config_hash as _hash
from rapid_apsp.utils.error_handling import ConfigurationError, StorageError

logger = structlog.get_logger(__name__)

# 没有公开数值的参数，以及它们的占位默认值
PLACEHOLDERS: Dict[str, float] = {
    "hbm_gbps": 6553.6,
    "fenand_gbps": 256.0,
    "ucie_pj_per_bit": 0.5,
    "hbm_pj_per_bit": 3.9,
    "fenand_read_pj_per_bit": 10.0,
    "fenand_write_pj_per_bit": 40.0,
    "logic_op_pj": 0.01,
    "dma_burst_pj": 1.0,
    "comparator_pj": 0.5,
}


class DeviceConfig(BaseModel):
    """
    硬件参数

    所有数值严格为正；未知键被拒绝。
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    # 时序与写入
    clock_ns: float = Field(default=2.0, gt=0, description="时钟周期")
    set_reset_ns: float = Field(default=20.0, gt=0, description="写脉冲宽度")
    write_energy_pj: float = Field(default=0.56, gt=0, description="单元编程能量")

    # PCM 单元几何
    unit_rows: int = Field(default=1024, gt=0)
    unit_cols: int = Field(default=1024, gt=0)
    units_per_tile: int = Field(default=130, gt=0)
    fw_tiles: int = Field(default=16, gt=0, description="PCM-FW 片数")
    mp_tiles: int = Field(default=16, gt=0, description="PCM-MP 片数")
    mp_stages: int = Field(default=2, ge=1, le=2, description="跨分区合并的级数")

    # 存内逻辑原语延迟
    cycles_xor: int = Field(default=2, gt=0)
    cycles_nor: int = Field(default=1, gt=0)
    cycles_not: int = Field(default=1, gt=0)
    cycles_nand: int = Field(default=1, gt=0)
    cycles_minority: int = Field(default=1, gt=0)
    cycles_or: int = Field(default=1, gt=0)
    bits: int = Field(default=32, ge=1, description="字宽")

    # 置换单元
    dma_read_cycles: int = Field(default=1, gt=0)
    dma_write_cycles: int = Field(default=10, gt=0)
    burst_rows: int = Field(default=32, gt=0, description="突发缓冲的行数")

    # 比较树
    comparator_stage_cycles: int = Field(default=6, gt=0)
    comparator_fanin: int = Field(default=32, ge=2)

    # 片间互联与存储层级
    ucie_gbps: float = Field(default=2048.0, gt=0, description="64 lanes × 32 Gb/s")
    hbm_gbps: float = Field(default=PLACEHOLDERS["hbm_gbps"], gt=0)
    fenand_gbps: float = Field(default=PLACEHOLDERS["fenand_gbps"], gt=0)
    ucie_pj_per_bit: float = Field(default=PLACEHOLDERS["ucie_pj_per_bit"], gt=0)
    hbm_pj_per_bit: float = Field(default=PLACEHOLDERS["hbm_pj_per_bit"], gt=0)
    fenand_read_pj_per_bit: float = Field(default=PLACEHOLDERS["fenand_read_pj_per_bit"], gt=0)
    fenand_write_pj_per_bit: float = Field(default=PLACEHOLDERS["fenand_write_pj_per_bit"], gt=0)

    # 逻辑能耗（每个原语作用于一个比特单元）
    logic_op_pj: float = Field(default=PLACEHOLDERS["logic_op_pj"], gt=0)
    dma_burst_pj: float = Field(default=PLACEHOLDERS["dma_burst_pj"], gt=0)
    comparator_pj: float = Field(default=PLACEHOLDERS["comparator_pj"], gt=0, description="每次整行归约")

    # 静态功耗
    fw_unit_power_mw: float = Field(default=690.88, gt=0)
    mp_unit_power_mw: float = Field(default=690.98, gt=0)
    hbm_power_w: float = Field(default=8.6, gt=0)
    fenand_power_w: float = Field(default=6.4, gt=0)
    controller_power_w: float = Field(default=3.5, gt=0)

    # 面积（仅回显）
    fw_unit_area_um2: float = Field(default=23821.24, gt=0)
    mp_unit_area_um2: float = Field(default=24171.94, gt=0)
    hbm_area_mm2: float = Field(default=121.0, gt=0)
    fenand_area_mm2: float = Field(default=3000.0, gt=0)
    controller_area_mm2: float = Field(default=225.0, gt=0)

    # 选择性写入概率；缺省时由计数模式的小规模运行标定
    update_probability: Optional[float] = Field(default=None, gt=0, le=1)

    @property
    def write_pulse_cycles(self) -> int:
        """写脉冲占用的周期数"""
        return math.ceil(self.set_reset_ns / self.clock_ns - 1e-9)

    @property
    def clock_s(self) -> float:
        return self.clock_ns * 1e-9

    def seconds(self, cycles: int) -> float:
        return cycles * self.clock_s

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def config_hash(self) -> str:
        return _hash(self.echo())

    def placeholder_fields(self) -> List[str]:
        """仍为占位值的字段"""
        return sorted(name for name, default in PLACEHOLDERS.items() if getattr(self, name) == default)


def _parse(path: Path, text: str) -> Dict[str, Any]:
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            data = tomllib.loads(text)
        elif suffix == ".json":
            data = json.loads(text)
        else:
            raise ConfigurationError(
                f"unsupported device config format {suffix!r}", details={"path": str(path)}
            )
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot parse {path}: {e}", details={"path": str(path)}) from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must hold a table of settings", details={"path": str(path)})
    # 允许整体放在 [device] 表下
    if set(data) == {"device"} and isinstance(data["device"], dict):
        data = data["device"]
    return data


def load_device_config(path: Union[str, Path]) -> DeviceConfig:
    """
    读取 TOML 或 JSON 器件文件

    Raises:
        StorageError: 文件无法读取
        ConfigurationError: 格式不支持、无法解析或字段非法
    """
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(f"cannot read {source}: {e}", details={"path": str(source)}) from e
    data = _parse(source, text)
    try:
        cfg = DeviceConfig(**data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid device config {source}: {e}", details={"path": str(source)}) from e
    logger.debug("device_config_loaded", path=str(source), config_hash=cfg.config_hash())
    return cfg


def resolve_device_config(path: Optional[Union[str, Path]] = None) -> DeviceConfig:
    """显式路径优先，其次 RAPID_DEVICE_CONFIG，否则默认值"""
    if path is None:
        from rapid_apsp.config.settings import get_settings

        path = get_settings().device_config
    return load_device_config(path) if path is not None else DeviceConfig()
