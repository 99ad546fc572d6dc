"""
=============================================================================
toricmld - 命令模块 / CLI commands
=============================================================================

本文件实现命令行的全部子命令：

1. mld_command - 循环商或锥文件的最小对数偏差
2. normalize_command - 良构性报告与规范化
3. reduce_command - 锥到循环商的约化
4. lift_command - +1 提升
5. sequence_command - 极限序列（JSON lines）
6. enumerate_command - 谱普查（CSV 或 JSON）
7. report_command - 累积诊断

所有命令都：
- 接受 CommandContext 和对应的参数模型
- 返回 CommandResult，output 就是要写到标准输出的完整字节
- 领域错误以 MldError 抛出，由 CommandExecutor 统一转换成退出码

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

import json
from fractions import Fraction
from typing import Any, List, Literal, Optional

# =============================================================================
# 第三方库导入
# =============================================================================

from pydantic import BaseModel, Field, ValidationError

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import (
    CommandContext,
    CommandResult,
    ParseError,
    SmoothSingularityError,
    SpecificationError,
    parse_integer,
    parse_rational,
    render_rational,
    render_vector,
    resolve_path,
)
from mld_tools.cone import mld_toric, reduce_to_cyclic, toric_gorenstein_index
from mld_tools.constructions import SequenceSpec, lift, sequence_report
from mld_tools.io import read_cone_file
from mld_tools.quotient import (
    NormalizationTrace,
    QuotientType,
    classify,
    describe,
    gorenstein_index,
    is_well_formed,
    mld,
    normalize,
    parse_quotient,
)
from mld_tools.survey import SurveyConfig, load_spectrum, render_spectrum, run_survey, survey_report


# =============================================================================
# 参数模型定义 (Argument Models)
# =============================================================================

class MldArgs(BaseModel):
    """
    mld 命令的参数模型。

    属性:
        quotient (Optional[str]): "N:a1,...,an" 形式的循环商
        cone (Optional[str]): 锥文件路径
    二者必须恰好给出一个。
    """
    quotient: Optional[str] = Field(None, description="Cyclic quotient type N:a1,...,an")
    cone: Optional[str] = Field(None, description="Path to a cone file")


class NormalizeArgs(BaseModel):
    quotient: str = Field(..., description="Cyclic quotient type N:a1,...,an")


class ReduceArgs(BaseModel):
    cone: str = Field(..., description="Path to a cone file")


class LiftArgs(BaseModel):
    quotient: str = Field(..., description="Cyclic quotient type N:a1,...,an")
    times: int = Field(default=1, ge=1, description="Number of +1 lifts to compose")


class SequenceArgs(BaseModel):
    """
    sequence 命令的参数模型。

    属性:
        base (str): 底类型 "N:a1,...,am"
        l (int): 极限点中坐标 1 的个数
        n (int): 目标维数
        orders (str): 逗号分隔的阶列表，例如 "4,7,13"
        workers (Optional[int]): 进程数，默认取上下文配置
    """
    base: str = Field(..., description="Base quotient type N:a1,...,am")
    l: int = Field(..., ge=0, description="Number of unit coordinates of the limit point")
    n: int = Field(..., ge=1, description="Target dimension")
    orders: str = Field(..., description="Comma separated orders N, each N = 1 mod q")
    workers: Optional[int] = Field(None, ge=1, description="Worker processes")


class EnumerateArgs(BaseModel):
    dim: int = Field(..., ge=1, description="Dimension n")
    max_order: int = Field(..., ge=2, description="Largest group order B")
    out: Optional[str] = Field(None, description="Spectrum file; stdout when omitted")
    format: Literal["csv", "json"] = Field("csv", description="Spectrum file format")
    workers: Optional[int] = Field(None, ge=1, description="Worker processes")


class ReportArgs(BaseModel):
    dim: int = Field(..., ge=1, description="Dimension n")
    max_order: int = Field(..., ge=2, description="Largest group order B")
    lower: str = Field("", description="Comma separated lower-dimensional spectrum files")
    delta: str = Field("1/20", description="Neighbourhood radius p/q")
    workers: Optional[int] = Field(None, ge=1, description="Worker processes")


# =============================================================================
# 渲染辅助函数
# =============================================================================

def _dump(ctx: CommandContext, payload: Any) -> str:
    return json.dumps(payload, indent=ctx.json_indent, ensure_ascii=False) + "\n"


def _optional(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else render_rational(value)


def _trace_payload(trace: NormalizationTrace) -> dict:
    return {
        "source": str(trace.source),
        "dropped": trace.dropped,
        "kept": trace.kept,
        "scales": trace.scales,
        "passes": trace.passes,
        "identity": trace.is_identity,
    }


def _normalized(text: str) -> tuple[QuotientType, QuotientType, NormalizationTrace]:
    source = parse_quotient(text)
    reduced, trace = normalize(source)
    return source, reduced, trace


# =============================================================================
# 命令实现
# =============================================================================

def mld_command(ctx: CommandContext, args: MldArgs) -> CommandResult:
    """
    计算最小对数偏差。

    循环商输入先规范化，输出里带上规范化记录；锥文件输入走格点判别。
    """
    if (args.quotient is None) == (args.cone is None):
        raise SpecificationError("give exactly one of --quotient or --cone")

    if args.quotient is not None:
        source, reduced, trace = _normalized(args.quotient)
        result = mld(reduced)
        payload = {
            "input": str(source),
            "normalized": str(reduced),
            **describe(result),
            "class": None if result.is_smooth else classify(result).value,
            "index": gorenstein_index(reduced),
            "trace": _trace_payload(trace),
        }
    else:
        cone = read_cone_file(resolve_path(args.cone, ctx.workspace_root))
        result = mld_toric(cone)
        payload = {
            "input": args.cone,
            **describe(result),
            "class": None if result.is_smooth else classify(result).value,
            "index": toric_gorenstein_index(cone),
        }
    return CommandResult(success=True, output=_dump(ctx, payload), data=payload)


def normalize_command(ctx: CommandContext, args: NormalizeArgs) -> CommandResult:
    """良构性报告 + 规范化结果 + 规范化记录。"""
    source = parse_quotient(args.quotient)
    report = is_well_formed(source)
    reduced, trace = normalize(source)
    payload = {
        "input": str(source),
        "well_formed": report.ok,
        "zero_weight_indices": report.zero_weight_indices,
        "generates_group": report.generates_group,
        "quasi_reflections": report.quasi_reflections,
        "normalized": str(reduced),
        "trace": _trace_payload(trace),
    }
    return CommandResult(success=True, output=_dump(ctx, payload), data=payload)


def reduce_command(ctx: CommandContext, args: ReduceArgs) -> CommandResult:
    """把锥文件约化为循环商，并报告 mld 是否一致。"""
    cone = read_cone_file(resolve_path(args.cone, ctx.workspace_root))
    reduced, trace = reduce_to_cyclic(cone)
    payload = {
        "input": args.cone,
        "quotient": str(reduced),
        "mld_log": render_rational(trace.mld_log),
        "mld_disc": render_rational(trace.mld_log - 1),
        "witness": render_vector(trace.witness),
        "support": list(trace.support),
        "raw": str(trace.raw),
        "trace": _trace_payload(trace.normalization),
        "verified": trace.verified,
    }
    return CommandResult(success=True, output=_dump(ctx, payload), data=payload)


def lift_command(ctx: CommandContext, args: LiftArgs) -> CommandResult:
    """+1 提升 times 次。"""
    source, reduced, trace = _normalized(args.quotient)
    if reduced.is_trivial:
        raise SmoothSingularityError(f"{source} is smooth after normalization: nothing to lift")
    result = lift(reduced, args.times)
    payload = {
        "input": str(source),
        "normalized": str(reduced),
        "times": result.times,
        "lifted": str(result.lifted),
        "dimension": result.lifted.dimension,
        "steps": [str(q) for q in result.steps],
        "mld_before": render_rational(result.mld_before),
        "mld_after": render_rational(result.mld_after),
    }
    return CommandResult(success=True, output=_dump(ctx, payload), data=payload)


def _parse_orders(text: str) -> List[int]:
    tokens = [t for t in text.split(",") if t.strip()]
    if not tokens:
        raise ParseError("--orders needs at least one order")
    return [parse_integer(t) for t in tokens]


def sequence_command(ctx: CommandContext, args: SequenceArgs) -> CommandResult:
    """
    构造极限序列，每项一行 JSON，最后一行是汇总。

    底类型先规范化；规范化后光滑则报错。
    """
    _, base, _ = _normalized(args.base)
    if base.is_trivial:
        raise SmoothSingularityError(f"base {args.base} is smooth after normalization")
    spec = SequenceSpec(base=base, l=args.l, n=args.n, orders=_parse_orders(args.orders))
    report = sequence_report(spec, workers=args.workers or ctx.workers)

    records = [
        {
            "order": term.order,
            "quotient": str(term.quotient),
            "weights": list(term.quotient.weights),
            "point": render_vector(term.point.coords),
            "expected_mld": render_rational(term.expected_mld),
            "verified_mld": render_rational(term.verified_mld),
        }
        for term in report.terms
    ]
    summary = {
        "summary": True,
        "base": str(report.base),
        "epsilon": render_rational(report.epsilon),
        "limit": render_rational(report.limit),
        "from_above": report.from_above.from_above,
        "strictly_decreasing": report.from_above.strictly_decreasing,
        "constant": report.constant,
        "violations": report.from_above.violations,
        "last_gap": _optional(report.from_above.last_gap),
        "limit_point": render_vector(report.limit_point.coords),
        "limit_face": report.limit_face._asdict(),
        "face_quotient": str(report.face_quotient),
        "face_reproduces_base": report.face_reproduces_base,
        "faces_ok": report.faces_ok,
    }
    output = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records + [summary])
    return CommandResult(success=True, output=output, data={"terms": records, "summary": summary})


def _survey_config(ctx: CommandContext, args: BaseModel, **extra: Any) -> SurveyConfig:
    try:
        return SurveyConfig(
            dimension=args.dim,
            max_order=args.max_order,
            workers=args.workers or ctx.workers,
            **extra,
        )
    except ValidationError as exc:
        raise SpecificationError(f"invalid survey settings: {exc.errors()[0]['msg']}") from exc


def enumerate_command(ctx: CommandContext, args: EnumerateArgs) -> CommandResult:
    """普查 n 维谱；给出 --out 时写文件并输出摘要，否则直接输出谱。"""
    output = None if args.out is None else resolve_path(args.out, ctx.workspace_root)
    config = _survey_config(ctx, args, output=output)
    entries = run_survey(config, fmt=args.format, indent=ctx.json_indent)
    summary = {
        "dim": args.dim,
        "max_order": args.max_order,
        "types": sum(e.multiplicity for e in entries),
        "values": [render_rational(e.mld_log) for e in entries],
    }
    if config.output is None:
        text = render_spectrum(entries, fmt=args.format, indent=ctx.json_indent)
        return CommandResult(success=True, output=text, data=summary)
    summary["path"] = str(config.output)
    return CommandResult(success=True, output=_dump(ctx, summary), data=summary)


def report_command(ctx: CommandContext, args: ReportArgs) -> CommandResult:
    """累积诊断：低维谱从 --lower 读入，n 维谱现场计算。"""
    config = _survey_config(ctx, args, delta=parse_rational(args.delta))
    paths = [p.strip() for p in args.lower.split(",") if p.strip()]
    lower = [load_spectrum(resolve_path(p, ctx.workspace_root)) for p in paths]
    report = survey_report(config, lower)
    payload = {
        "dim": report.dimension,
        "max_order": report.max_order,
        "delta": render_rational(report.delta),
        "values": report.values,
        "min_value": _optional(report.min_value),
        "max_value": _optional(report.max_value),
        "upper_bound_ok": report.upper_bound_ok,
        "half_attained": report.half_attained,
        "candidates": [
            {
                "value": render_rational(c.value),
                "sources": c.sources,
                "below": c.below,
                "above": c.above,
                "tension": c.tension,
                "construction_dim": c.construction_dim,
                "constructible": c.constructible,
            }
            for c in report.candidates
        ],
    }
    return CommandResult(success=True, output=_dump(ctx, payload), data=payload)
