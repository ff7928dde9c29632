"""
RAPID APSP - 图文件读写

支持两种格式:
- 边列表文本: 首行 "n m"，随后 m 行 "u v w"（ASCII十进制，LF结尾）
- 二进制CSR: 魔数 "RGCSR1"，小端 u64 n、u64 m，随后 rowptr(u64×(n+1))、col(u32×m)、val(u32×m)
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import BinaryIO, List, Union

import numpy as np
import structlog

from rapid_apsp.graph.csr import Graph
from rapid_apsp.graph.tropical import INF
from rapid_apsp.utils.error_handling import GraphFormatError, ParseError, StorageError, VertexRangeError

logger = structlog.get_logger(__name__)

CSR_MAGIC = b"RGCSR1"
_HEADER_DTYPE = np.dtype("<u8")

Source = Union[BinaryIO, bytes]


def _as_stream(source: Source) -> BinaryIO:
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(bytes(source))
    return source


def load_edge_list(source: Source) -> Graph:
    """
    解析边列表文本

    空行与以 '#' 开头的行被忽略。重复边合并为最小权值，自环被丢弃。

    Raises:
        ParseError: 格式错误（携带行号）
        VertexRangeError: 顶点编号 >= n
    """
    stream = _as_stream(source)
    header = None
    src: List[int] = []
    dst: List[int] = []
    weight: List[int] = []
    declared_m = 0

    for lineno, raw in enumerate(stream, start=1):
        try:
            line = raw.decode("ascii").strip()
        except UnicodeDecodeError:
            raise ParseError("non-ASCII content", line=lineno) from None
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            numbers = [int(f) for f in fields]
        except ValueError:
            raise ParseError(f"expected integers, got {line!r}", line=lineno) from None

        if header is None:
            if len(numbers) != 2 or numbers[0] < 0 or numbers[1] < 0:
                raise ParseError("header must be 'n m' with non-negative integers", line=lineno)
            header = (numbers[0], numbers[1])
            declared_m = numbers[1]
            continue

        if len(numbers) != 3:
            raise ParseError("edge line must be 'u v w'", line=lineno)
        u, v, w = numbers
        n = header[0]
        if u < 0 or v < 0 or u >= n or v >= n:
            raise VertexRangeError(
                f"line {lineno}: vertex id out of range for n={n}",
                details={"line": lineno, "u": u, "v": v, "n": n},
            )
        if w < 0 or w >= INF:
            raise ParseError(f"weight {w} outside [0, {INF})", line=lineno)
        src.append(u)
        dst.append(v)
        weight.append(w)

    if header is None:
        raise ParseError("missing 'n m' header", line=1)
    if len(src) != declared_m:
        raise ParseError(
            f"header declares {declared_m} edges, found {len(src)}", line=lineno if src else 1
        )

    g = Graph.from_edges(header[0], src, dst, weight)
    logger.debug("edge_list_loaded", n=g.n, declared_m=declared_m, canonical_m=g.m)
    return g


def dump_edge_list(g: Graph) -> bytes:
    """序列化为边列表文本"""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in g.edges())
    return ("\n".join(lines) + "\n").encode("ascii")


def dump_csr(g: Graph) -> bytes:
    """序列化为二进制CSR"""
    parts = [
        CSR_MAGIC,
        np.array([g.n, g.m], dtype=_HEADER_DTYPE).tobytes(),
        g.rowptr.astype("<u8").tobytes(),
        g.col.astype("<u4").tobytes(),
        g.val.astype("<u4").tobytes(),
    ]
    return b"".join(parts)


def parse_csr(data: bytes) -> Graph:
    """解析二进制CSR"""
    if not data.startswith(CSR_MAGIC):
        raise GraphFormatError("bad CSR magic", details={"expected": CSR_MAGIC.decode()})
    offset = len(CSR_MAGIC)
    if len(data) < offset + 16:
        raise GraphFormatError("truncated CSR header")
    n, m = (int(x) for x in np.frombuffer(data, dtype=_HEADER_DTYPE, count=2, offset=offset))
    offset += 16
    expected = offset + 8 * (n + 1) + 8 * m
    if len(data) != expected:
        raise GraphFormatError(
            "CSR payload size mismatch", details={"expected": expected, "actual": len(data)}
        )
    rowptr = np.frombuffer(data, dtype="<u8", count=n + 1, offset=offset)
    offset += 8 * (n + 1)
    col = np.frombuffer(data, dtype="<u4", count=m, offset=offset)
    offset += 4 * m
    val = np.frombuffer(data, dtype="<u4", count=m, offset=offset)
    return Graph(n=n, rowptr=rowptr, col=col, val=val)


def save_csr(g: Graph, path: Union[str, Path]) -> Path:
    return _write_bytes(Path(path), dump_csr(g))


def load_csr(path: Union[str, Path]) -> Graph:
    return parse_csr(_read_bytes(Path(path)))


def write_graph(g: Graph, path: Union[str, Path], fmt: str = "edgelist") -> Path:
    """按格式写图文件（edgelist | csr）"""
    if fmt == "csr":
        return save_csr(g, path)
    if fmt == "edgelist":
        return _write_bytes(Path(path), dump_edge_list(g))
    raise GraphFormatError(f"unknown graph format {fmt!r}")


def read_graph(path: Union[str, Path]) -> Graph:
    """读图文件，按魔数自动识别二进制CSR，否则按边列表解析"""
    data = _read_bytes(Path(path))
    if data.startswith(CSR_MAGIC):
        return parse_csr(data)
    return load_edge_list(data)


def _read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}", details={"path": str(path)}) from e


def _write_bytes(path: Path, data: bytes) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}", details={"path": str(path)}) from e
    return path
