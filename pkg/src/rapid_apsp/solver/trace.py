"""
RAPID APSP - 执行轨迹

求解过程中每次内核调用的规模与每次数据搬运的字节数，按层/步骤记录。
模拟器只消费轨迹，不接触距离矩阵。
"""

from __future__ import annotations

from collections import defaultdict
from enum import Enum, IntEnum
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, Field

from rapid_apsp.models.artifacts import ArtifactHeader, ArtifactKind


class Step(IntEnum):
    """递归算法的四个步骤"""

    INTRA = 1  # 分区内 FW
    BOUNDARY = 2  # 边界图构造与求解
    INJECT = 3  # 注入边界距离后重跑 FW
    CROSS = 4  # 跨分区 min-plus 合并


class KernelKind(str, Enum):
    FW = "fw"
    MP = "mp"


class Stage(IntEnum):
    """片间数据流的七个阶段"""

    CSR_STREAM_IN = 1  # 冷存储 CSR 读入并展开
    FW_WRITEBACK = 2  # FW 结果按行写回 HBM3
    BOUNDARY_PREP = 3  # 构造边界图 / 预取下一批 FW 块
    MP_FETCH = 4  # MP 片从 HBM3 取子矩阵
    BOUNDARY_SYNC = 5  # 跨分区同步边界数据
    RESULT_STORE = 6  # 结果写入 FeNAND
    BOUNDARY_FETCH = 7  # MP 片从 FeNAND 取边界矩阵


class KernelRecord(BaseModel):
    """
    一次内核调用

    FW: rows 为块边长。
    MP: 输出 rows × cols，内维 inner；两级合并时第二级内维为 inner2。
    updates 仅在计数模式下有值。
    """

    level: int
    step: Step
    component: int
    kernel: KernelKind
    rows: int = Field(ge=0)
    inner: int = Field(ge=0)
    cols: int = Field(ge=0)
    inner2: int = Field(default=0, ge=0)
    stages: int = Field(default=1, ge=1, le=2)
    peer: Optional[int] = None
    updates: Optional[int] = None


class TransferRecord(BaseModel):
    """一次数据搬运"""

    level: int
    stage: Stage
    nbytes: int = Field(ge=0)
    what: str


class ExecutionTrace(ArtifactHeader):
    """一次求解的完整轨迹"""

    kind: ArtifactKind = ArtifactKind.EXECUTION_TRACE
    n: int
    m: int
    tile_limit: int
    depth: int = 0
    top_within_tile: bool = True
    instrumented: bool = False
    kernels: List[KernelRecord] = Field(default_factory=list)
    transfers: List[TransferRecord] = Field(default_factory=list)

    def add_kernel(self, record: KernelRecord) -> None:
        self.kernels.append(record)

    def add_transfer(self, level: int, stage: Stage, nbytes: int, what: str) -> None:
        self.transfers.append(TransferRecord(level=level, stage=stage, nbytes=int(nbytes), what=what))

    def bytes_by_stage(self) -> Dict[int, int]:
        totals = {int(s): 0 for s in Stage}
        for t in self.transfers:
            totals[int(t.stage)] += t.nbytes
        return totals

    def kernel_groups(self) -> Iterator[Tuple[Tuple[int, int, str], List[KernelRecord]]]:
        """按 (层, 步骤, 内核) 分组，组的顺序即执行顺序"""
        groups: Dict[Tuple[int, int, str], List[KernelRecord]] = defaultdict(list)
        order: List[Tuple[int, int, str]] = []
        for rec in self.kernels:
            key = (rec.level, int(rec.step), rec.kernel.value)
            if key not in groups:
                order.append(key)
            groups[key].append(rec)
        for key in order:
            yield key, groups[key]

    def total_updates(self) -> int:
        return sum(r.updates or 0 for r in self.kernels)
