"""
=============================================================================
toricmld - 谱普查模块 / Bounded surveys of cyclic quotients
=============================================================================

本文件在有限窗口内穷举循环商奇点并汇总 mld 谱：

1. enumerate_quotients - 按 (N, weights) 字典序给出所有良构规范形类型
2. spectrum - 每维的 mld 谱（值、重数、见证），可按 N 分片并行
3. accumulation_report - 在候选极限点附近的计数（诊断性质，不是证明）
4. persist_spectrum / load_spectrum - CSV 或 JSON 持久化，精确往返
5. run_survey / survey_report - 由 SurveyConfig 驱动的普查与诊断（命令行使用）

普查同时做两项检查，失败时抛出 VerificationError：
    - 每个类型的 mld ≤ n/2
    - 二维时 A 型族 1/N(1, N-1) 的 mld 全部等于 1

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Dict, Iterator, List, Literal, Optional, Sequence, Tuple

# =============================================================================
# 第三方库导入
# =============================================================================

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import VerificationError
from mld_tools.io import (
    SpectrumRow,
    read_spectrum_csv,
    read_spectrum_json,
    spectrum_to_csv,
    spectrum_to_json,
    write_spectrum_csv,
    write_spectrum_json,
)
from mld_tools.quotient import (
    QuotientType,
    canonical_weights,
    classify,
    gorenstein_index,
    is_well_formed_weights,
    mld,
)


# =============================================================================
# 数据模型 (Domain types)
# =============================================================================

class SurveyConfig(BaseModel):
    """
    一次普查的参数。

    属性:
        dimension: 维数 n ≥ 1
        max_order: 阶的上界 B ≥ 2
        output: 谱文件路径，None 表示不落盘
        delta: 累积分析的邻域半径，默认 1/20
        workers: 并行进程数，只影响耗时
    """

    dimension: int = Field(..., ge=1)
    max_order: int = Field(..., ge=2)
    output: Optional[Path] = None
    delta: Fraction = Fraction(1, 20)
    workers: int = Field(default=1, ge=1)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("delta", mode="before")
    @classmethod
    def _coerce_delta(cls, value):
        return Fraction(value)

    @field_validator("delta")
    @classmethod
    def _positive(cls, value):
        if value <= 0:
            raise ValueError(f"delta must be positive, got {value}")
        return value


class SpectrumEntry(BaseModel):
    """
    谱中的一个值。

    属性:
        mld_log: 最小对数偏差
        multiplicity: 窗口内达到该值的规范形类型个数
        witness: 按 (N, weights) 序第一个达到该值的类型
    """

    mld_log: Fraction
    multiplicity: int = Field(..., ge=1)
    witness: QuotientType

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def dimension(self) -> int:
        return self.witness.dimension

    def to_row(self) -> SpectrumRow:
        return SpectrumRow(
            dim=self.witness.dimension,
            order=self.witness.order,
            weights=self.witness.weights,
            mld_log=self.mld_log,
            singularity_class=classify(mld(self.witness)),
            index=gorenstein_index(self.witness),
            multiplicity=self.multiplicity,
        )

    @classmethod
    def from_row(cls, row: SpectrumRow) -> "SpectrumEntry":
        return cls(
            mld_log=row.mld_log,
            multiplicity=row.multiplicity,
            witness=QuotientType(order=row.order, weights=row.weights),
        )


class AccumulationCandidate(BaseModel):
    """
    一个候选极限值 v 附近的计数。

    属性:
        value: 候选值 v（低维谱中的值，或 0）
        sources: 谱中含有 v 的低维维数
        below / above: n 维谱中落在 (v-δ, v) 与 (v, v+δ] 内的值的个数
        tension: below > 0，即出现了"从下方"靠近的值，需要人工检查
        construction_dim: 由最低维见证经极限序列（l = 0）构造 v 所需的维数 m + ⌈v⌉
        constructible: n ≥ construction_dim
    """

    value: Fraction
    sources: List[int]
    below: int
    above: int
    tension: bool
    construction_dim: Optional[int]
    constructible: bool

    model_config = ConfigDict(arbitrary_types_allowed=True)


class AccumulationReport(BaseModel):
    """
    n 维谱的累积诊断。

    upper_bound_ok 为整个谱满足 mld ≤ n/2；half_attained 记录 n 为偶数时
    1/2(1,...,1) 是否以 n/2 出现在谱中（n 为奇数时为 None）。
    """

    dimension: int
    max_order: int
    delta: Fraction
    values: int
    min_value: Optional[Fraction]
    max_value: Optional[Fraction]
    upper_bound_ok: bool
    half_attained: Optional[bool]
    candidates: List[AccumulationCandidate]

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def tensions(self) -> List[AccumulationCandidate]:
        return [c for c in self.candidates if c.tension]


# =============================================================================
# 枚举 (Enumeration)
# =============================================================================

def _is_canonical(weights: Tuple[int, ...], order: int) -> bool:
    return is_well_formed_weights(weights, order) and canonical_weights(weights, order) == weights


def quotients_of_order(n: int, order: int) -> List[QuotientType]:
    """
    阶恰为 N 的全部良构规范形 n 维类型，按权重字典序排列。

    规范形若含单位权重必以 1 开头；否则所有权重都不是单位。两种情形分别枚举
    非降序权重组，再用 canonical_weights 去重。
    """
    found = []
    for rest in combinations_with_replacement(range(1, order), n - 1):
        weights = (1,) + rest
        if _is_canonical(weights, order):
            found.append(weights)
    non_units = [a for a in range(2, order) if math.gcd(a, order) > 1]
    for weights in combinations_with_replacement(non_units, n):
        if _is_canonical(weights, order):
            found.append(weights)
    return [QuotientType(order=order, weights=w) for w in sorted(found)]


def enumerate_quotients(n: int, max_order: int) -> Iterator[QuotientType]:
    """
    依次给出所有 N ≤ B 的良构规范形 n 维类型，每个恰好一次。

    示例:
        n=2, B=3 → 1/2(1,1), 1/3(1,1), 1/3(1,2)
        n=1      → 空（一维商规范化后都是光滑的）
    """
    for order in range(2, max_order + 1):
        yield from quotients_of_order(n, order)


# =============================================================================
# 谱 (Spectrum)
# =============================================================================

def _survey_order(job: Tuple[int, int]) -> List[Tuple[QuotientType, Fraction]]:
    n, order = job
    return [(q, mld(q).mld_log) for q in quotients_of_order(n, order)]


def _check_a_series(max_order: int) -> None:
    for order in range(2, max_order + 1):
        value = mld(QuotientType(order=order, weights=(1, order - 1))).mld_log
        if value != 1:
            raise VerificationError(f"1/{order}(1,{order - 1}) has mld {value}, expected 1")


def spectrum(n: int, max_order: int, workers: int = 1) -> List[SpectrumEntry]:
    """
    n 维、阶不超过 B 的 mld 谱，按值升序。

    按 N 分片计算，合并时按 N 的顺序进行，所以结果与 workers 无关。

    异常:
        VerificationError: 某类型超出 n/2 上界，或 A 型族的 mld 不是 1
    """
    jobs = [(n, order) for order in range(2, max_order + 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_survey_order, jobs))
    else:
        chunks = [_survey_order(job) for job in jobs]

    bound = Fraction(n, 2)
    witnesses: Dict[Fraction, QuotientType] = {}
    counts: Dict[Fraction, int] = {}
    total = 0
    for chunk in chunks:
        for q, value in chunk:
            total += 1
            if value > bound:
                raise VerificationError(f"{q} has mld {value} above the bound n/2 = {bound}")
            if value not in witnesses:
                witnesses[value] = q
                counts[value] = 0
            counts[value] += 1
    if n == 2:
        _check_a_series(max_order)

    entries = [
        SpectrumEntry(mld_log=value, multiplicity=counts[value], witness=witnesses[value])
        for value in sorted(witnesses)
    ]
    logger.info(f"spectrum dim={n} B={max_order}: {total} types, {len(entries)} distinct values")
    return entries


# =============================================================================
# 累积诊断 (Accumulation diagnostics)
# =============================================================================

def accumulation_report(
    n: int,
    max_order: int,
    lower_spectra: Sequence[Sequence[SpectrumEntry]],
    delta: Fraction = Fraction(1, 20),
    workers: int = 1,
    entries: Optional[Sequence[SpectrumEntry]] = None,
) -> AccumulationReport:
    """
    对每个候选值 v（低维谱的全部值加上 0）统计 n 维谱在 (v-δ, v) 与 (v, v+δ] 中的值数。

    参数:
        lower_spectra: 维数低于 n 的谱，应使用相同或更大的 B 计算
        entries: 已算好的 n 维谱；None 时现场计算

    below > 0 的候选只记录为"需要检查"，不视为失败。
    """
    delta = Fraction(delta)
    if entries is None:
        entries = spectrum(n, max_order, workers=workers)
    values = [e.mld_log for e in entries]

    sources: Dict[Fraction, List[int]] = {Fraction(0): []}
    smallest_witness: Dict[Fraction, int] = {}
    for lower in lower_spectra:
        for entry in lower:
            if entry.dimension >= n:
                logger.warning(f"ignoring entry of dimension {entry.dimension} in lower spectra for n={n}")
                continue
            dims = sources.setdefault(entry.mld_log, [])
            if entry.dimension not in dims:
                dims.append(entry.dimension)
            current = smallest_witness.get(entry.mld_log)
            if current is None or entry.dimension < current:
                smallest_witness[entry.mld_log] = entry.dimension

    candidates = []
    for v in sorted(sources):
        below = sum(1 for x in values if v - delta < x < v)
        above = sum(1 for x in values if v < x <= v + delta)
        m = smallest_witness.get(v)
        construction_dim = None if m is None else m + math.ceil(v)
        candidate = AccumulationCandidate(
            value=v,
            sources=sorted(sources[v]),
            below=below,
            above=above,
            tension=below > 0,
            construction_dim=construction_dim,
            constructible=construction_dim is not None and n >= construction_dim,
        )
        if candidate.tension:
            logger.warning(f"dim {n}: {below} spectrum values just below candidate {v} (delta {delta})")
        candidates.append(candidate)

    bound = Fraction(n, 2)
    half_attained = None
    if n % 2 == 0:
        half = QuotientType(order=2, weights=(1,) * n)
        half_attained = any(e.mld_log == bound and e.witness == half for e in entries)
    return AccumulationReport(
        dimension=n,
        max_order=max_order,
        delta=delta,
        values=len(values),
        min_value=min(values) if values else None,
        max_value=max(values) if values else None,
        upper_bound_ok=all(x <= bound for x in values),
        half_attained=half_attained,
        candidates=candidates,
    )


# =============================================================================
# 持久化 (Persistence)
# =============================================================================

SpectrumFormat = Literal["csv", "json"]


def render_spectrum(entries: Sequence[SpectrumEntry], fmt: SpectrumFormat = "csv",
                    indent: Optional[int] = None) -> str:
    """把谱渲染成文件内容；相同的谱总是得到相同的字节。"""
    rows = [e.to_row() for e in entries]
    if fmt == "json":
        return spectrum_to_json(rows, indent=indent)
    return spectrum_to_csv(rows)


def persist_spectrum(entries: Sequence[SpectrumEntry], path: Path, fmt: Optional[SpectrumFormat] = None,
                     indent: Optional[int] = None) -> None:
    """写谱文件；fmt 为 None 时按后缀判断（.json 为 JSON，其余为 CSV）。"""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    rows = [e.to_row() for e in entries]
    if fmt == "json":
        write_spectrum_json(rows, path, indent=indent)
    else:
        write_spectrum_csv(rows, path)
    logger.info(f"persisted {len(entries)} spectrum entries to {path}")


def load_spectrum(path: Path) -> List[SpectrumEntry]:
    """
    读谱文件，并重算每个见证的 mld。

    异常:
        PersistenceError: 文件无法读取
        ParseError: 文件格式错误（附带行号或条目序号）
        VerificationError: 见证的 mld 与记录的值不符
    """
    path = Path(path)
    rows = read_spectrum_json(path) if path.suffix.lower() == ".json" else read_spectrum_csv(path)
    entries = [SpectrumEntry.from_row(row) for row in rows]
    for entry in entries:
        result = mld(entry.witness)
        if result.is_smooth or result.mld_log != entry.mld_log:
            raise VerificationError(
                f"{path}: witness {entry.witness} does not have the recorded mld {entry.mld_log}"
            )
    return entries


# =============================================================================
# 按配置普查 (Config-driven surveys)
# =============================================================================

def run_survey(config: SurveyConfig, fmt: Optional[SpectrumFormat] = None,
               indent: Optional[int] = None) -> List[SpectrumEntry]:
    """按 config 计算谱；config.output 不为 None 时同时写谱文件。"""
    entries = spectrum(config.dimension, config.max_order, workers=config.workers)
    if config.output is not None:
        persist_spectrum(entries, config.output, fmt=fmt, indent=indent)
    return entries


def survey_report(config: SurveyConfig,
                  lower_spectra: Sequence[Sequence[SpectrumEntry]]) -> AccumulationReport:
    """按 config 的维数、阶上界、δ 和进程数做累积诊断。"""
    return accumulation_report(
        config.dimension,
        config.max_order,
        lower_spectra,
        delta=config.delta,
        workers=config.workers,
    )
