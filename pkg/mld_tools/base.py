"""
=============================================================================
toricmld - 基础模块 / Base module
=============================================================================

本文件定义了整个项目共享的基础构件：

1. 有理数的文本表示 - render_rational / parse_rational（严格拒绝浮点数）
2. 异常层次结构 - MldError 及其子类，CLI 根据类型决定退出码
3. CommandResult - 命令执行结果的标准返回格式
4. CommandContext - 命令执行上下文（工作目录、并行度、输出宽度）
5. resolve_path - 路径解析函数

所有数值都是精确的 Fraction，项目中任何地方都不出现浮点数。

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

import os               # 操作系统接口，用于路径展开
import re               # 正则表达式，用于严格解析有理数字面量
from fractions import Fraction  # 精确有理数
from pathlib import Path  # 面向对象的文件路径处理
from typing import Any, Iterable, Literal, Optional, Tuple  # 类型提示

# =============================================================================
# 第三方库导入
# =============================================================================

from pydantic import BaseModel, ConfigDict, Field  # 数据验证和设置管理


# =============================================================================
# 有理数表示 (Rational values)
# =============================================================================

# 向量统一使用 Fraction 元组，矩阵使用行元组的元组
Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]

# 只接受 "p" 或 "p/q"，不接受 "0.5"、"1e3"、"1/2.0" 等写法
_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_INTEGER_RE = re.compile(r"^[+-]?\d+$")


def render_rational(value: Fraction | int) -> str:
    """
    将有理数渲染为精确字符串 / Render a rational exactly.

    分母为 1 时只输出分子，否则输出 "p/q"（最简形式，分母为正）。

    示例:
        >>> render_rational(Fraction(3, 5))
        '3/5'
        >>> render_rational(Fraction(4, 2))
        '2'
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_vector(values: Iterable[Fraction | int]) -> list[str]:
    """逐个坐标渲染一个有理向量。"""
    return [render_rational(v) for v in values]


def parse_rational(text: str, line: Optional[int] = None) -> Fraction:
    """
    严格解析有理数字面量 / Parse an exact rational literal.

    参数:
        text (str): "p" 或 "p/q" 形式的文本
        line (Optional[int]): 所在行号，用于错误信息

    异常:
        ParseError: 文本是浮点数、指数形式、分母为 0 或其他非法写法
    """
    token = text.strip()
    if not _RATIONAL_RE.match(token):
        raise ParseError(f"not an exact rational literal: {text!r}", line=line)
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise ParseError(f"zero denominator in {text!r}", line=line)
        return Fraction(int(num), int(den))
    return Fraction(int(token))


def parse_integer(text: str, line: Optional[int] = None) -> int:
    """严格解析十进制整数，拒绝小数和分数。"""
    token = text.strip()
    if not _INTEGER_RE.match(token):
        raise ParseError(f"not an integer literal: {text!r}", line=line)
    return int(token)


# =============================================================================
# 异常层次 (Error hierarchy)
# =============================================================================
# MldError 的所有子类都是"领域错误"：CLI 输出错误信息并以状态 1 退出。
# ParseError 与 SpecificationError 属于"用法错误"：CLI 以状态 2 退出。
# =============================================================================

class MldError(Exception):
    """所有领域错误的基类 / Base class of every domain error."""

    exit_code: int = 1


class ParseError(MldError):
    """
    文本输入无法解析（商类型、有理数、锥文件、谱文件）。

    属性:
        line (Optional[int]): 出错的行号（从 1 开始），未知时为 None
    """

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpecificationError(MldError):
    """命令或构造的前置条件不满足（维数下界、同余条件、参数组合）。"""

    exit_code = 2


class DimensionMismatchError(MldError):
    """向量或矩阵的维数与格不一致。"""


class LatticeError(MldError):
    """格数据非法：基矩阵奇异、子格不包含于格、射线退化等。"""


class IllFormedQuotientError(MldError):
    """要求良构（well-formed）输入的操作收到了未规范化的商类型。"""


class NonGeneratingWeightsError(MldError):
    """权重与阶数不互素：gcd(a_1, ..., a_n, N) != 1，声明的阶数有误。"""


class SmoothSingularityError(MldError):
    """操作要求奇异输入，但输入是光滑的（最小偏差无定义）。"""


class VerificationError(MldError):
    """构造或约化的后置条件在计算验证中失败。"""


class PersistenceError(MldError):
    """谱文件读写时发生 I/O 错误。"""


# =============================================================================
# 命令执行结果与上下文 (Command result & context)
# =============================================================================

class CommandResult(BaseModel):
    """
    命令执行结果的标准返回格式。

    所有命令函数都返回这个类的实例，CLI 统一负责渲染和退出码。

    属性:
        success (bool): 命令是否成功
        output (str): 人类可读的输出或错误信息
        data (Optional[Any]): JSON 可序列化的结构化负载
            - 成功时写到标准输出
            - 失败时不输出任何负载
        exit_code (int): 进程退出码（0 成功，1 领域错误，2 用法错误）

    示例:
        >>> CommandResult(success=True, output="mld 3/5", data={"mld_log": "3/5"})
        >>> CommandResult(success=False, output="smooth", exit_code=1)
    """

    success: bool = Field(
        ...,
        description="命令是否成功 / Whether the command succeeded"
    )

    output: str = Field(
        ...,
        description="输出信息或错误信息 / Output or error message"
    )

    data: Optional[Any] = Field(
        None,
        description="结构化负载 / Structured payload"
    )

    exit_code: int = Field(
        default=0,
        description="进程退出码 / Process exit status"
    )


class CommandContext(BaseModel):
    """
    命令执行上下文。

    属性:
        workspace_root (Path): 相对路径的解析基准目录
        workers (int): 谱枚举时使用的进程数，1 表示串行
            - 并行度只影响耗时，不影响任何输出字节
        json_indent (Optional[int]): JSON 输出的缩进宽度，None 表示紧凑输出
        env (str): 运行环境 ("cli" 或 "library")
    """

    workspace_root: Path = Field(
        default_factory=Path.cwd,
        description="相对路径的解析基准 / Base directory for relative paths"
    )

    workers: int = Field(
        default=1,
        ge=1,
        description="并行进程数 / Number of worker processes"
    )

    json_indent: Optional[int] = Field(
        default=None,
        ge=0,
        description="JSON 缩进宽度 / JSON indentation width"
    )

    env: Literal["cli", "library"] = Field(
        default="cli",
        description="运行环境 (cli / library)"
    )

    model_config = ConfigDict(frozen=True)


# =============================================================================
# 路径处理
# =============================================================================

def resolve_path(path: str | Path, workspace_root: Path) -> Path:
    """
    解析用户给出的路径。

    参数:
        path (str | Path): 相对或绝对路径，可以包含 ~
        workspace_root (Path): 相对路径的基准目录

    返回:
        Path: 解析后的绝对路径

    示例:
        >>> resolve_path("spectra/dim2.csv", Path("/work"))
        PosixPath('/work/spectra/dim2.csv')
    """
    path_obj = Path(os.path.expanduser(str(path)))
    if path_obj.is_absolute():
        return path_obj.resolve()
    return (workspace_root.resolve() / path_obj).resolve()
