"""
RAPID APSP - 错误处理工具

提供统一的异常层次、异常装饰器和错误追踪器。
每个异常类声明其对应的命令行退出码。
"""

from __future__ import annotations

import functools
import traceback
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Optional, Tuple, Type, TypeVar

import structlog

logger = structlog.get_logger(__name__)

T = TypeVar("T")

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


class RapidGraphError(Exception):
    """RAPID APSP 基础异常类"""

    exit_code: int = EXIT_USAGE

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        self.timestamp = datetime.now(timezone.utc)


class ArgumentError(RapidGraphError):
    """参数错误（超出范围、维度不匹配等）"""


class PreconditionError(RapidGraphError):
    """内核前置条件不满足"""


class ConsistencyError(RapidGraphError):
    """数据之间不一致（矩阵尺寸、索引映射、trace与配置）"""


class CapacityError(RapidGraphError):
    """超出PCM单元容量"""


class ConfigurationError(RapidGraphError):
    """配置错误"""


class GraphFormatError(RapidGraphError):
    """图数据格式错误"""

    exit_code = EXIT_IO


class ParseError(GraphFormatError):
    """文本解析错误，携带行号"""

    def __init__(self, message: str, line: int, **kwargs: Any):
        details = kwargs.pop("details", {}) or {}
        details["line"] = line
        super().__init__(f"line {line}: {message}", details=details, **kwargs)
        self.line = line


class VertexRangeError(GraphFormatError):
    """顶点编号越界"""


class SchemaError(RapidGraphError):
    """产物的schema版本或类型不匹配"""

    exit_code = EXIT_IO


class StorageError(RapidGraphError):
    """文件读写错误"""

    exit_code = EXIT_IO


class ErrorTracker:
    """错误追踪器 - 记录和统计错误"""

    def __init__(self, max_errors: int = 1000):
        self.max_errors = max_errors
        self.errors: List[Dict[str, Any]] = []
        self.error_counts: Dict[str, int] = {}

    def record_error(
        self,
        error: Exception,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        """记录错误"""
        error_info = {
            "timestamp": datetime.now(timezone.utc),
            "error_type": type(error).__name__,
            "error_message": str(error),
            "error_code": getattr(error, "error_code", None),
            "context": context or {},
            "traceback": traceback.format_exc(),
        }
        self.errors.append(error_info)

        error_key = f"{error_info['error_type']}:{error_info['error_code']}"
        self.error_counts[error_key] = self.error_counts.get(error_key, 0) + 1

        if len(self.errors) > self.max_errors:
            self.errors = self.errors[-self.max_errors :]

    def get_error_stats(self) -> Dict[str, Any]:
        """获取错误统计信息"""
        most_common = sorted(
            self.error_counts.items(), key=lambda x: x[1], reverse=True
        )[:10]
        return {
            "total_errors": len(self.errors),
            "unique_errors": len(self.error_counts),
            "most_common": most_common,
            "recent_errors": [
                {
                    "timestamp": err["timestamp"].isoformat(),
                    "type": err["error_type"],
                    "message": err["error_message"][:100],
                }
                for err in self.errors[-10:]
            ],
        }

    def clear(self) -> None:
        self.errors.clear()
        self.error_counts.clear()


# 全局错误追踪器
global_error_tracker = ErrorTracker()


def handle_exceptions(
    *,
    logger: Optional[structlog.stdlib.BoundLogger] = None,
    default_return: Any = None,
    reraise: bool = True,
    track_errors: bool = True,
    passthrough: Tuple[Type[BaseException], ...] = (),
) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """
    异常处理装饰器

    Args:
        logger: 日志记录器
        default_return: reraise=False 时的返回值
        reraise: 是否重新抛出异常
        track_errors: 是否写入全局错误追踪器
        passthrough: 原样抛出、不记录的异常类型（如命令行的正常退出）
    """

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            try:
                return func(*args, **kwargs)
            except passthrough:
                raise
            except Exception as e:
                context = {
                    "function": func.__name__,
                    "module": func.__module__,
                    "kwargs_keys": sorted(kwargs.keys()),
                }
                if track_errors:
                    global_error_tracker.record_error(e, context)
                if logger:
                    logger.error(
                        "exception_caught",
                        error=str(e),
                        error_type=type(e).__name__,
                        error_code=getattr(e, "error_code", None),
                        **context,
                    )
                if reraise:
                    raise
                return default_return

        return wrapper

    return decorator


def exit_code_for(error: BaseException) -> int:
    """把异常映射到命令行退出码"""
    if isinstance(error, RapidGraphError):
        return error.exit_code
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_USAGE
