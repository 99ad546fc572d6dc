"""
=============================================================================
toricmld - 循环商奇点模块 / Cyclic quotient singularities
=============================================================================

本文件是整个项目的核心表示层，处理形如 1/N(a_1, ..., a_n) 的循环商奇点：

1. QuotientType / HypercubePoint / MldResult - 核心数据模型
2. generating_point / multiple / age - 生成点、m 倍点与年龄 (age)
3. is_well_formed / normalize - 良构性检查与规范化（去掉环面因子和拟反射）
4. mld / classify / gorenstein_index - 最小对数偏差、奇点分类、Gorenstein 指数
5. canonical_form - 去重用的规范形
6. face_signature / point_order / face_quotient - 超立方体 H 中的面结构

最小对数偏差 (minimal log-discrepancy) 由 Reid–Tai 判别给出：
    mld = min_{k=1..N-1} Σ_i {k·a_i / N}
前提是输入已经良构；toric-cone 模块的格点计算是它的独立校验。

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

import re                        # 解析 "N:a1,...,an" 文本形式
from enum import Enum            # 奇点分类枚举
from fractions import Fraction   # 精确有理数
from math import gcd, lcm, prod  # 整数数论工具
from typing import List, Literal, NamedTuple, Optional, Tuple, Union

# =============================================================================
# 第三方库导入
# =============================================================================

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import (
    IllFormedQuotientError,
    NonGeneratingWeightsError,
    ParseError,
    SmoothSingularityError,
    SpecificationError,
    Vector,
    VerificationError,
    render_rational,
)
from mld_tools.lattice import lattice_from_generators, primitive_generator


# =============================================================================
# 数据模型 (Domain types)
# =============================================================================

class QuotientType(BaseModel):
    """
    循环商奇点 1/N(a_1, ..., a_n)。

    属性:
        order (int): 群的阶 N ≥ 1
        weights (Tuple[int, ...]): 权重 a_i，满足 0 ≤ a_i < N

    只有平凡类型（N = 1）允许权重为空，它代表规范化后塌缩成光滑点的情形。

    示例:
        >>> q = QuotientType(order=5, weights=(1, 2))
        >>> str(q)
        '5:1,2'
    """

    order: int = Field(..., ge=1, description="群的阶 N / group order")
    weights: Tuple[int, ...] = Field(..., description="权重向量 / weight vector")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_range(self) -> "QuotientType":
        for a in self.weights:
            if not 0 <= a < self.order:
                raise ValueError(f"weight {a} outside [0, {self.order})")
        if not self.weights and self.order != 1:
            raise ValueError("only the trivial type (order 1) may have no weights")
        return self

    @classmethod
    def trivial(cls) -> "QuotientType":
        """规范化后的光滑（平凡）类型。"""
        return cls(order=1, weights=())

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1 and not self.weights

    def __str__(self) -> str:
        return format_quotient(self)


class HypercubePoint(BaseModel):
    """
    闭单位超立方体 H = [0, 1]^n 中的有理点。

    生成点 α、它的倍点 α^(m) 以及极限构造中的点 T、A_N 都用它表示。
    """

    coords: Vector

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("coords", mode="before")
    @classmethod
    def _coerce(cls, value):
        return tuple(Fraction(x) for x in value)

    @field_validator("coords")
    @classmethod
    def _inside_cube(cls, value):
        for c in value:
            if not 0 <= c <= 1:
                raise ValueError(f"coordinate {c} outside [0, 1]")
        return value

    @property
    def coordinate_sum(self) -> Fraction:
        return sum(self.coords, Fraction(0))


class Smooth(BaseModel):
    """光滑情形：所有子锥都正则，最小偏差无定义。"""

    kind: Literal["smooth"] = "smooth"

    model_config = ConfigDict(frozen=True)

    @property
    def is_smooth(self) -> bool:
        return True


class Singular(BaseModel):
    """
    奇异情形：精确的最小对数偏差及见证。

    属性:
        mld_log (Fraction): 最小对数偏差（= 1 + 最小偏差），恒为正
        witness_index (Optional[int]): 循环商情形下达到最小值的群元 k
        witness_point (Optional[Vector]): 一般环面情形下达到最小值的格点
    """

    kind: Literal["singular"] = "singular"
    mld_log: Fraction
    witness_index: Optional[int] = None
    witness_point: Optional[Vector] = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check(self) -> "Singular":
        if self.mld_log <= 0:
            raise ValueError("quotient singularities are klt: mld_log must be positive")
        if (self.witness_index is None) == (self.witness_point is None):
            raise ValueError("exactly one of witness_index / witness_point must be set")
        return self

    @property
    def is_smooth(self) -> bool:
        return False

    @property
    def mld_disc(self) -> Fraction:
        """最小偏差 = mld_log - 1。"""
        return self.mld_log - 1

    @property
    def witness(self) -> Union[int, Vector]:
        return self.witness_index if self.witness_index is not None else self.witness_point


MldResult = Union[Smooth, Singular]


class SingularityClass(str, Enum):
    """奇点分类：terminal ⟺ mld > 1，canonical ⟺ mld ≥ 1，klt ⟺ mld > 0。"""

    TERMINAL = "terminal"
    CANONICAL_NOT_TERMINAL = "canonical-not-terminal"
    KLT_NOT_CANONICAL = "klt-not-canonical"


class WellFormednessReport(BaseModel):
    """
    良构性报告。

    属性:
        zero_weight_indices: 权重为 0 的坐标（从 1 开始编号），对应环面因子
        generates_group: gcd(a_1, ..., a_n, N) = 1
        quasi_reflections: 使 α^(k) 恰有一个非零坐标的 k
    """

    zero_weight_indices: List[int] = Field(default_factory=list)
    generates_group: bool = True
    quasi_reflections: List[int] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.generates_group and not self.zero_weight_indices and not self.quasi_reflections


class NormalizationTrace(BaseModel):
    """
    规范化记录。

    属性:
        source: 原始输入
        dropped: 被去掉的零权重坐标（原始编号，从 1 开始）
        kept: 保留下来的坐标（原始编号）
        scales: 与 kept 对齐的 c_i，P_i = e_i / c_i
        passes: 规范化迭代的轮数
    """

    source: QuotientType
    dropped: List[int] = Field(default_factory=list)
    kept: List[int] = Field(default_factory=list)
    scales: List[int] = Field(default_factory=list)
    passes: int = 0

    @property
    def is_identity(self) -> bool:
        return not self.dropped and all(c == 1 for c in self.scales)


class FaceSignature(NamedTuple):
    """H 中一个点所在面的特征：等于 0、等于 1、严格介于两者之间的坐标个数。"""

    zeros: int
    ones: int
    interior: int


# =============================================================================
# 文本形式 "N:a1,...,an"
# =============================================================================

_QUOTIENT_RE = re.compile(r"^(\d+):(\d+(?:,\d+)*)?$")


def parse_quotient(text: str) -> QuotientType:
    """
    解析商类型的文本形式 / Parse "N:a1,...,an".

    权重用逗号分隔，不允许空白，每个权重必须落在 [0, N) 内。

    异常:
        ParseError: 语法错误或权重越界
    """
    match = _QUOTIENT_RE.match(text)
    if not match:
        raise ParseError(f"quotient type must look like N:a1,...,an, got {text!r}")
    order = int(match.group(1))
    weights = tuple(int(a) for a in match.group(2).split(",")) if match.group(2) else ()
    try:
        return QuotientType(order=order, weights=weights)
    except ValidationError as exc:
        raise ParseError(f"invalid quotient type {text!r}: {exc.errors()[0]['msg']}") from exc


def format_quotient(q: QuotientType) -> str:
    return f"{q.order}:{','.join(str(a) for a in q.weights)}"


# =============================================================================
# 生成点与倍点 (Generating points and multiples)
# =============================================================================

def generating_point(q: QuotientType) -> HypercubePoint:
    """生成元 x 在基 {P_i} 下的坐标 (a_1/N, ..., a_n/N)。"""
    return HypercubePoint(coords=tuple(Fraction(a, q.order) for a in q.weights))


def multiple(alpha: HypercubePoint, m: int) -> HypercubePoint:
    """
    α 的 m 倍点 α^(m)：坐标为 1 的位置保持 1，其余取 {m·α_i}。

    m 可以为零或负数。

    示例:
        >>> multiple(HypercubePoint(coords=[Fraction(1, 3), 1, 0, Fraction(2, 5)]), 2).coords
        (Fraction(2, 3), Fraction(1, 1), Fraction(0, 1), Fraction(4, 5))
    """
    return HypercubePoint(
        coords=tuple(c if c == 1 else (m * c) % 1 for c in alpha.coords)
    )


def _age_numerator(weights: Tuple[int, ...], order: int, k: int) -> int:
    return sum((k * a) % order for a in weights)


def age(q: QuotientType, k: int) -> Fraction:
    """
    群元 k 的年龄 Σ_i {k·a_i / N}，即 F 在 α^(k) 处的取值。

    异常:
        SpecificationError: k 不在 1..N-1 内
    """
    if not 1 <= k <= q.order - 1:
        raise SpecificationError(f"age index k={k} outside 1..{q.order - 1}")
    return Fraction(_age_numerator(q.weights, q.order, k), q.order)


def face_signature(alpha: HypercubePoint) -> FaceSignature:
    zeros = sum(1 for c in alpha.coords if c == 0)
    ones = sum(1 for c in alpha.coords if c == 1)
    return FaceSignature(zeros=zeros, ones=ones, interior=len(alpha.coords) - zeros - ones)


def point_order(alpha: HypercubePoint) -> int:
    """α 的阶：最小的 k ≥ 1 使 α^(k) 是 H 的顶点。"""
    return lcm(1, *(c.denominator for c in alpha.coords if c != 1))


def face_quotient(alpha: HypercubePoint) -> Tuple[QuotientType, List[int]]:
    """
    α 在自身所在面上定义的循环商。

    返回:
        (商类型, 内部坐标的编号列表（从 1 开始）)；α 是顶点时返回平凡类型
    """
    interior = [i for i, c in enumerate(alpha.coords, start=1) if 0 < c < 1]
    if not interior:
        return QuotientType.trivial(), []
    values = [alpha.coords[i - 1] for i in interior]
    order = lcm(*(c.denominator for c in values))
    weights = tuple(int(c * order) for c in values)
    return QuotientType(order=order, weights=weights), interior


# =============================================================================
# 良构性与规范化 (Well-formedness and normalization)
# =============================================================================

def _generates(weights: Tuple[int, ...], order: int) -> bool:
    return gcd(order, *weights) == 1


def _quasi_reflection_free(weights: Tuple[int, ...], order: int) -> bool:
    # 对生成群的权重：存在拟反射 ⟺ 某个 i 使 gcd(N, a_j : j ≠ i) > 1
    for i in range(len(weights)):
        rest = weights[:i] + weights[i + 1:]
        if gcd(order, *rest) > 1:
            return False
    return True


def is_well_formed_weights(weights: Tuple[int, ...], order: int) -> bool:
    """is_well_formed 的快速谓词版本（枚举时使用）。"""
    if order == 1:
        return not weights
    if not weights or 0 in weights:
        return False
    return _generates(weights, order) and _quasi_reflection_free(weights, order)


def is_well_formed(q: QuotientType) -> WellFormednessReport:
    """
    检查商类型是否良构，列出全部违例。

    - 零权重：奇点分裂为低维奇点与环面的乘积
    - 不生成：gcd(a, N) ≠ 1，声明的阶数偏大
    - 拟反射：α^(k) 恰有一个非零坐标
    """
    zeros = [i for i, a in enumerate(q.weights, start=1) if a == 0]
    reflections = []
    for k in range(1, q.order):
        nonzero = sum(1 for a in q.weights if (k * a) % q.order)
        if nonzero == 1:
            reflections.append(k)
    return WellFormednessReport(
        zero_weight_indices=zeros,
        generates_group=_generates(q.weights, q.order),
        quasi_reflections=reflections,
    )


def require_well_formed(q: QuotientType, operation: str) -> None:
    if not is_well_formed_weights(q.weights, q.order):
        raise IllFormedQuotientError(
            f"{operation} needs a well-formed quotient type, got {q}; normalize it first"
        )


def normalize(q: QuotientType) -> Tuple[QuotientType, NormalizationTrace]:
    """
    把任意生成群的商类型规范化为良构类型。

    步骤:
        1. 去掉所有零权重坐标（环面因子），记录原始编号
        2. 在诱导格 Z^n + Z·(a/N) 中对每个坐标轴求本原生成元 P_i = e_i / c_i
        3. 在 P 基下重写生成点，新阶数 N' = N / Π c_i
    重复以上步骤直到稳定；N' = 1 时返回平凡类型。

    异常:
        NonGeneratingWeightsError: gcd(a_1, ..., a_n, N) ≠ 1

    示例:
        1/4(1,2,0) → 1/2(1,1)，dropped=[3]，scales=[2, 1]
        1/6(2,3)   → 平凡类型，scales=[3, 2]
    """
    if not _generates(q.weights, q.order):
        raise NonGeneratingWeightsError(
            f"gcd of weights and order of {q} is {gcd(q.order, *q.weights)}, not 1: "
            "the stated order is wrong"
        )

    order = q.order
    weights = list(q.weights)
    kept = list(range(1, q.dimension + 1))
    scales = {i: 1 for i in kept}
    dropped: List[int] = []
    passes = 0

    while True:
        passes += 1
        for position in reversed(range(len(weights))):
            if weights[position] == 0:
                dropped.append(kept.pop(position))
                weights.pop(position)
        if not weights:
            order = 1
            break

        m = len(weights)
        generators = [[1 if i == j else 0 for i in range(m)] for j in range(m)]
        generators.append([Fraction(a, order) for a in weights])
        lattice = lattice_from_generators(generators)
        factors = [
            int(1 / primitive_generator(generators[i], lattice)[i]) for i in range(m)
        ]
        if all(c == 1 for c in factors):
            break

        coords = [Fraction(a * c, order) % 1 for a, c in zip(weights, factors)]
        new_order = order // prod(factors)
        if lcm(1, *(x.denominator for x in coords)) != new_order:
            raise VerificationError(
                f"rebased generating point of {q} does not have order {new_order}"
            )
        for index, c in zip(kept, factors):
            scales[index] *= c
        order = new_order
        weights = [int(x * order) for x in coords]
        if order == 1:
            weights = []
            break

    result = QuotientType.trivial() if order == 1 else QuotientType(order=order, weights=tuple(weights))
    trace = NormalizationTrace(
        source=q,
        dropped=sorted(dropped),
        kept=kept,
        scales=[scales[i] for i in kept],
        passes=passes,
    )
    if not trace.is_identity:
        logger.debug(f"normalized {q} -> {result} (dropped {trace.dropped}, scales {trace.scales})")
    return result, trace


# =============================================================================
# 最小对数偏差 (Minimal log-discrepancy)
# =============================================================================

def mld(q: QuotientType) -> MldResult:
    """
    良构循环商的最小对数偏差 / Reid–Tai minimal log-discrepancy.

    N = 1 时返回 Smooth；否则返回 min_{k} age(q, k)，见证取最小的 k。

    异常:
        IllFormedQuotientError: 输入未规范化

    示例:
        1/5(1,2)   → 3/5（年龄依次为 3/5, 6/5, 4/5, 7/5）
        1/7(1,2,4) → 1
    """
    require_well_formed(q, "mld")
    if q.order == 1:
        return Smooth()
    best_value, best_k = min(
        (_age_numerator(q.weights, q.order, k), k) for k in range(1, q.order)
    )
    return Singular(mld_log=Fraction(best_value, q.order), witness_index=best_k)


def classify(result: MldResult) -> SingularityClass:
    """
    按阈值分类：mld > 1 为 terminal，mld = 1 为 canonical，0 < mld < 1 为 klt。

    异常:
        SmoothSingularityError: 输入是 Smooth
    """
    if result.is_smooth:
        raise SmoothSingularityError("smooth: minimal discrepancy undefined, nothing to classify")
    if result.mld_log > 1:
        return SingularityClass.TERMINAL
    if result.mld_log == 1:
        return SingularityClass.CANONICAL_NOT_TERMINAL
    return SingularityClass.KLT_NOT_CANONICAL


def gorenstein_index(q: QuotientType) -> int:
    """Gorenstein 指数 N / gcd(N, Σ a_i)。"""
    require_well_formed(q, "gorenstein_index")
    return q.order // gcd(q.order, sum(q.weights))


def generating_elements(q: QuotientType) -> List[int]:
    """所有年龄等于 mld 的群元 k（生成元并不唯一）。"""
    result = mld(q)
    if result.is_smooth:
        raise SmoothSingularityError(f"{q} is smooth: it has no generating element")
    target = result.mld_log * q.order
    return [k for k in range(1, q.order) if _age_numerator(q.weights, q.order, k) == target]


def rebase_to_generator(q: QuotientType) -> QuotientType:
    """
    返回与 q 同构、且自身生成点就达到 mld 的类型 u·a mod N。

    u 取生成元中最小的单位；若没有单位生成元则无法重选生成点。
    """
    elements = generating_elements(q)
    units = [k for k in elements if gcd(k, q.order) == 1]
    if not units:
        raise SpecificationError(
            f"no generating element of {q} is a unit mod {q.order}; "
            "its mld is not realised by a generator of the group"
        )
    u = units[0]
    if u == 1:
        return q
    return QuotientType(order=q.order, weights=tuple((u * a) % q.order for a in q.weights))


# =============================================================================
# 规范形 (Canonical form)
# =============================================================================

def canonical_weights(weights: Tuple[int, ...], order: int) -> Tuple[int, ...]:
    """
    {sort(u·a mod N) : gcd(u, N) = 1} 中字典序最小的向量。

    若某个权重是单位，最小向量必以 1 开头，只需尝试这些权重的逆元；
    否则遍历全部单位。
    """
    unit_weights = [a for a in weights if gcd(a, order) == 1]
    if unit_weights:
        multipliers = {pow(a, -1, order) for a in unit_weights}
    else:
        multipliers = (u for u in range(1, order) if gcd(u, order) == 1)
    return min(tuple(sorted((u * a) % order for a in weights)) for u in multipliers)


def canonical_form(q: QuotientType) -> QuotientType:
    """
    去重用的规范形：单位缩放加置换下的字典序最小代表元。

    它是去重键，不是已证明的完全同构不变量。
    """
    require_well_formed(q, "canonical_form")
    if q.order == 1:
        return q
    return QuotientType(order=q.order, weights=canonical_weights(q.weights, q.order))


def describe(result: MldResult) -> dict:
    """把 MldResult 渲染成 JSON 友好的字典（有理数一律为 "p/q" 字符串）。"""
    if result.is_smooth:
        return {"smooth": True, "mld_log": None, "mld_disc": None, "witness": None}
    witness = result.witness
    return {
        "smooth": False,
        "mld_log": render_rational(result.mld_log),
        "mld_disc": render_rational(result.mld_disc),
        "witness": witness if isinstance(witness, int) else [render_rational(x) for x in witness],
    }
