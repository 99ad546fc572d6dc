"""
=============================================================================
toricmld - 配置模块 / Settings
=============================================================================

从环境变量（以及当前目录下的 .env 文件）读取运行配置：

    MLD_LOG_LEVEL    日志级别，默认 WARNING
    MLD_LOG_DIR      日志文件目录，未设置时只输出到 stderr
    MLD_WORKERS      谱枚举的默认进程数，默认 1
    MLD_JSON_INDENT  JSON 输出缩进，未设置时输出紧凑 JSON

这些变量都不会改变任何计算结果，也不会改变持久化谱文件的字节。

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv  # 从 .env 文件加载环境变量
from pydantic import BaseModel, ConfigDict, Field

from mld_tools.base import SpecificationError


LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """运行配置。"""

    log_level: str = Field(default="WARNING", description="loguru 日志级别")
    log_dir: Optional[Path] = Field(default=None, description="日志文件目录")
    workers: int = Field(default=1, ge=1, description="默认并行进程数")
    json_indent: Optional[int] = Field(default=None, ge=0, description="JSON 缩进宽度")

    model_config = ConfigDict(frozen=True)


def _int_variable(name: str, minimum: int) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw.strip())
    except ValueError as exc:
        raise SpecificationError(f"{name} must be an integer, got {raw!r}") from exc
    if value < minimum:
        raise SpecificationError(f"{name} must be at least {minimum}, got {value}")
    return value


def load_settings() -> Settings:
    """
    加载 .env 并读取 MLD_* 环境变量。

    异常:
        SpecificationError: 变量取值非法
    """
    load_dotenv()

    level = os.getenv("MLD_LOG_LEVEL", "WARNING").strip().upper()
    if level not in LOG_LEVELS:
        raise SpecificationError(f"MLD_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {level!r}")

    log_dir = os.getenv("MLD_LOG_DIR")
    workers = _int_variable("MLD_WORKERS", 1)
    return Settings(
        log_level=level,
        log_dir=Path(log_dir).expanduser() if log_dir else None,
        workers=workers if workers is not None else 1,
        json_indent=_int_variable("MLD_JSON_INDENT", 0),
    )
