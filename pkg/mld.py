"""
=============================================================================
toricmld - 命令行入口 / Command-line entry point
=============================================================================

本文件是 toricmld 的命令行入口，包含：

1. CommandExecutor - 注册和执行子命令（参数校验、异常到退出码的映射）
2. build_parser - argparse 参数解析器
3. main - 解析参数、加载配置、执行命令、输出结果

退出码约定：
    0  成功，负载写到标准输出
    1  领域错误（光滑输入、非生成权重、验证失败、文件读写失败）
    2  用法错误（参数非法、文本无法解析、前置条件不满足）
失败时标准输出不写任何内容，错误信息写到标准错误。

用法示例:
    python mld.py mld --quotient 5:1,2
    python mld.py reduce --cone data/cones/z2xz2.cone
    python mld.py sequence --base 3:1,1 --l 0 --n 3 --orders 4,7,13
    python mld.py enumerate --dim 2 --max-order 100 --out spectra/dim2.csv

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

import argparse
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Type

# =============================================================================
# 第三方库导入
# =============================================================================

from dotenv import load_dotenv  # 从 .env 文件加载环境变量
from pydantic import BaseModel, ValidationError

# =============================================================================
# 项目内部模块导入
# =============================================================================

from log.logger import SessionLogger
from mld_tools.base import CommandContext, CommandResult, MldError
from mld_tools.commands import (
    mld_command, MldArgs,                # 最小对数偏差
    normalize_command, NormalizeArgs,    # 规范化
    reduce_command, ReduceArgs,          # 锥到循环商的约化
    lift_command, LiftArgs,              # +1 提升
    sequence_command, SequenceArgs,      # 极限序列
    enumerate_command, EnumerateArgs,    # 谱普查
    report_command, ReportArgs,          # 累积诊断
)
from mld_tools.config import load_settings


# =============================================================================
# 命令执行器
# =============================================================================

class CommandExecutor:
    """
    命令执行器 - 管理和执行所有注册的子命令。

    采用"注册-执行"模式：register() 记录函数和参数模型，
    execute() 负责参数校验、调用和错误转换。

    属性:
        _execution_map (Dict): {"命令名": (函数, 参数模型类)}
    """

    def __init__(self):
        self._execution_map: Dict[str, Tuple[Callable, Type[BaseModel]]] = {}

    def register(self, func: Callable, args_model: Type[BaseModel]) -> None:
        """
        注册一个命令，命令名为函数名去掉 "_command" 后缀。

        示例:
            >>> executor.register(mld_command, MldArgs)   # 注册为 "mld"
        """
        name = func.__name__.removesuffix("_command")
        self._execution_map[name] = (func, args_model)

    @property
    def commands(self) -> List[str]:
        return list(self._execution_map)

    def execute(self, name: str, raw_args: dict, ctx: CommandContext) -> CommandResult:
        """
        执行指定命令。

        执行流程:
            1. 查找命令
            2. 使用 Pydantic 模型验证参数（失败为用法错误）
            3. 调用命令函数
            4. 把 MldError 转换为带退出码的失败结果
        """
        if name not in self._execution_map:
            return CommandResult(success=False, output=f"unknown command {name!r}", exit_code=2)

        func, args_model = self._execution_map[name]
        try:
            args_instance = args_model(**raw_args)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or name
            return CommandResult(success=False, output=f"invalid --{field}: {first['msg']}", exit_code=2)

        try:
            return func(ctx, args_instance)
        except MldError as e:
            return CommandResult(success=False, output=str(e), exit_code=e.exit_code)


def build_executor() -> CommandExecutor:
    executor = CommandExecutor()
    executor.register(mld_command, MldArgs)
    executor.register(normalize_command, NormalizeArgs)
    executor.register(reduce_command, ReduceArgs)
    executor.register(lift_command, LiftArgs)
    executor.register(sequence_command, SequenceArgs)
    executor.register(enumerate_command, EnumerateArgs)
    executor.register(report_command, ReportArgs)
    return executor


# =============================================================================
# 参数解析
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mld",
        description="Exact minimal log-discrepancies of cyclic quotient and simplicial toric singularities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mld", help="minimal log-discrepancy of a quotient type or a cone file")
    p.add_argument("--quotient", help="N:a1,...,an")
    p.add_argument("--cone", help="cone file")

    p = sub.add_parser("normalize", help="well-formedness report and normal form")
    p.add_argument("--quotient", required=True, help="N:a1,...,an")

    p = sub.add_parser("reduce", help="reduce a simplicial cone to a cyclic quotient")
    p.add_argument("--cone", required=True, help="cone file")

    p = sub.add_parser("lift", help="raise the mld by exactly one per step")
    p.add_argument("--quotient", required=True, help="N:a1,...,an")
    p.add_argument("--times", type=int, default=1)

    p = sub.add_parser("sequence", help="limit sequence approaching epsilon + l")
    p.add_argument("--base", required=True, help="N:a1,...,am")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--orders", required=True, help="comma separated orders")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("enumerate", help="mld spectrum of one dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--out", help="spectrum file (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("report", help="accumulation diagnostics")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--lower", default="", help="comma separated lower-dimensional spectrum files")
    p.add_argument("--delta", default="1/20", help="neighbourhood radius p/q")
    p.add_argument("--workers", type=int)
    return parser


# =============================================================================
# 主程序入口
# =============================================================================

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse 自己已经把用法信息写到了 stderr
        return int(exc.code or 0)

    raw_args = {k: v for k, v in vars(namespace).items() if k != "command" and v is not None}
    name = namespace.command

    try:
        settings = load_settings()
    except MldError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    session = SessionLogger(level=settings.log_level, log_dir=settings.log_dir)
    ctx = CommandContext(
        workspace_root=Path.cwd(),
        workers=settings.workers,
        json_indent=settings.json_indent,
        env="cli",
    )

    session.log_command(name, raw_args)
    result = build_executor().execute(name, raw_args, ctx)
    session.log_outcome(name, result)

    if result.success:
        sys.stdout.write(result.output)
        sys.stdout.flush()
    else:
        session.log_error(name, result.output)
        print(f"error: {result.output}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    load_dotenv()
    sys.exit(main())
