"""
=============================================================================
toricmld - 构造模块 / Constructions
=============================================================================

两类正向构造，每一步都带计算验证：

1. lift_plus_one / lift - 追加权重 (1, N-1)，mld 恰好加 1
2. construct_limit_sequence - 以 ε + l 为极限的 n 维序列
       A_N = (1/N)·P + (1 - 1/N)·T
       T = (α; 1 × l; 0 × (n-m-l))，P = (0 × m; 0 × l; 1 × (n-m-l))
   对每个 N ≡ 1 (mod q) 构造阶恰为 N 的循环商，并断言 mld = A_N 的坐标和
3. verify_from_above - 检查数值序列是否"只从上方"趋近极限

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
from typing import List, Optional, Sequence, Tuple

# =============================================================================
# 第三方库导入
# =============================================================================

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import (
    SmoothSingularityError,
    SpecificationError,
    VerificationError,
)
from mld_tools.quotient import (
    FaceSignature,
    HypercubePoint,
    QuotientType,
    age,
    face_quotient,
    face_signature,
    generating_point,
    mld,
    normalize,
    point_order,
    rebase_to_generator,
    require_well_formed,
)


# =============================================================================
# +1 提升 (The +1 lift)
# =============================================================================

class LiftResult(BaseModel):
    """
    lift 的结果。

    属性:
        source: 输入类型
        steps: 每次 +1 提升后的类型，最后一个就是结果
        mld_before / mld_after: 提升前后的 mld，二者恰好相差 times
    """

    source: QuotientType
    steps: List[QuotientType]
    mld_before: Fraction
    mld_after: Fraction

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def lifted(self) -> QuotientType:
        return self.steps[-1]

    @property
    def times(self) -> int:
        return len(self.steps)


def _singular_mld(q: QuotientType, operation: str) -> Fraction:
    require_well_formed(q, operation)
    result = mld(q)
    if result.is_smooth:
        raise SmoothSingularityError(f"{operation} needs a singular quotient, {q} is smooth")
    return result.mld_log


def lift_plus_one(q: QuotientType) -> QuotientType:
    """
    维数加 2、mld 恰好加 1 的提升：1/N(a) ↦ 1/N(a, 1, N-1)。

    异常:
        IllFormedQuotientError: 输入未规范化
        SmoothSingularityError: 输入光滑
        VerificationError: 提升后的 mld 不等于原 mld + 1
    """
    before = _singular_mld(q, "lift_plus_one")
    lifted = QuotientType(order=q.order, weights=q.weights + (1, q.order - 1))
    after = mld(lifted)
    if after.is_smooth or after.mld_log != before + 1:
        raise VerificationError(f"lift of {q} to {lifted} did not raise the mld by exactly 1")
    return lifted


def lift(q: QuotientType, times: int = 1) -> LiftResult:
    """把 lift_plus_one 连续作用 times 次，并断言 mld 恰好增加 times。"""
    if times < 1:
        raise SpecificationError(f"--times must be at least 1, got {times}")
    before = _singular_mld(q, "lift")
    steps = []
    current = q
    for _ in range(times):
        current = lift_plus_one(current)
        steps.append(current)
    after = mld(current).mld_log
    if after != before + times:
        raise VerificationError(f"{times}-fold lift of {q} changed the mld by {after - before}")
    return LiftResult(source=q, steps=steps, mld_before=before, mld_after=after)


# =============================================================================
# 极限序列 (Limit sequences)
# =============================================================================

class SequenceSpec(BaseModel):
    """
    极限序列的参数。

    属性:
        base: m 维良构奇异类型，mld 为 ε，生成点阶为 q
        l: 非负整数，T 中坐标 1 的个数
        n: 目标维数，需满足 n ≥ m + ⌈ε⌉ + 2l
        orders: 要构造的阶 N 列表，每个 N ≥ 2 且 N ≡ 1 (mod q)
    """

    base: QuotientType
    l: int = Field(..., ge=0)
    n: int = Field(..., ge=1)
    orders: List[int] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)


class SequenceTerm(BaseModel):
    """序列中阶为 N 的一项。"""

    order: int
    point: HypercubePoint
    quotient: QuotientType
    expected_mld: Fraction
    verified_mld: Fraction

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class FromAboveReport(BaseModel):
    """
    verify_from_above 的结论。

    属性:
        all_above: 每一项都严格大于极限
        all_equal: 每一项都等于极限（常数族）
        from_above: all_above 或 all_equal
        non_increasing / strictly_decreasing: 单调性
        violations: 违反"从上方趋近"的项的编号（从 1 开始）
        last_gap: 最后一项与极限之差，空序列为 None
    """

    limit: Fraction
    all_above: bool
    all_equal: bool
    non_increasing: bool
    strictly_decreasing: bool
    violations: List[int]
    last_gap: Optional[Fraction]

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def from_above(self) -> bool:
        return self.all_above or self.all_equal


class SequenceReport(BaseModel):
    """
    一次完整的序列构造及其检查。

    faces_ok 检查极限点 T 的面：坐标 1 的个数为 l，坐标 0 的个数为 n-m-l，
    严格递减时 0 的个数至少为 l+1。face_reproduces_base 检查 T 所在面上的
    循环商就是（重选生成点后的）底类型。
    """

    spec: SequenceSpec
    base: QuotientType
    epsilon: Fraction
    limit: Fraction
    terms: List[SequenceTerm]
    from_above: FromAboveReport
    constant: bool
    limit_point: HypercubePoint
    limit_face: FaceSignature
    face_quotient: QuotientType
    face_reproduces_base: bool
    faces_ok: bool

    model_config = ConfigDict(arbitrary_types_allowed=True)


def verify_from_above(values: Sequence[Fraction], limit: Fraction) -> FromAboveReport:
    """
    检查序列是否只从上方趋近 limit。

    示例:
        [3/4, 5/7, 9/13], 2/3 → 全部在上方且严格递减
        [1, 1, 1], 1          → 常数族
        [1/2, 3/4], 2/3       → 第 1 项违例
    """
    values = [Fraction(v) for v in values]
    limit = Fraction(limit)
    all_above = all(v > limit for v in values)
    all_equal = all(v == limit for v in values)
    pairs = list(zip(values, values[1:]))
    violations = [] if all_equal else [i for i, v in enumerate(values, start=1) if v <= limit]
    return FromAboveReport(
        limit=limit,
        all_above=all_above,
        all_equal=all_equal,
        non_increasing=all(a >= b for a, b in pairs),
        strictly_decreasing=all(a > b for a, b in pairs),
        violations=violations,
        last_gap=values[-1] - limit if values else None,
    )


def _prepare(spec: SequenceSpec) -> Tuple[QuotientType, Fraction]:
    """检查前置条件，返回（生成点达到 mld 的底类型, ε）。"""
    epsilon = _singular_mld(spec.base, "construct_limit_sequence")
    base = spec.base
    if age(base, 1) != epsilon:
        base = rebase_to_generator(base)
        logger.info(f"rebased {spec.base} to {base} so that its generating point realises the mld")

    m = base.dimension
    r = math.ceil(epsilon)
    bound = m + r + 2 * spec.l
    if spec.n < bound:
        raise SpecificationError(
            f"dimension bound violated: n = {spec.n} < m + r + 2l = {m} + {r} + {2 * spec.l} = {bound}"
        )
    for N in spec.orders:
        if N < 2:
            raise SpecificationError(f"order {N} must be at least 2")
        if N % base.order != 1:
            raise SpecificationError(f"congruence violated: {N} ≢ 1 (mod {base.order})")
    return base, epsilon


def _limit_point(base: QuotientType, l: int, n: int) -> HypercubePoint:
    zeros = n - base.dimension - l
    return HypercubePoint(coords=generating_point(base).coords + (Fraction(1),) * l + (Fraction(0),) * zeros)


def _build_term(base: QuotientType, epsilon: Fraction, l: int, n: int, N: int) -> SequenceTerm:
    m = base.dimension
    scale = 1 - Fraction(1, N)
    T = _limit_point(base, l, n)
    coords = tuple(scale * t + (Fraction(1, N) if i >= m + l else 0) for i, t in enumerate(T.coords))
    point = HypercubePoint(coords=coords)
    if point_order(point) != N:
        raise VerificationError(f"point A_{N} has order {point_order(point)}, expected exactly {N}")

    quotient = QuotientType(order=N, weights=tuple(int(c * N) % N for c in coords))
    expected = point.coordinate_sum
    closed_form = Fraction(n - m - l, N) + scale * (epsilon + l)
    if expected != closed_form:
        raise VerificationError(f"coordinate sum {expected} of A_{N} differs from {closed_form}")

    reduced, _ = normalize(quotient)
    result = mld(reduced)
    if result.is_smooth or result.mld_log != expected:
        found = "smooth" if result.is_smooth else result.mld_log
        raise VerificationError(f"{quotient} has mld {found}, expected {expected}")
    logger.debug(f"sequence term N={N}: {quotient} mld {expected}")
    return SequenceTerm(order=N, point=point, quotient=quotient, expected_mld=expected, verified_mld=result.mld_log)


def _build_term_packed(args: Tuple[QuotientType, Fraction, int, int, int]) -> SequenceTerm:
    return _build_term(*args)


def construct_limit_sequence(spec: SequenceSpec, workers: int = 1) -> List[SequenceTerm]:
    """
    为 spec.orders 中的每个 N 构造一项，按输入顺序返回。

    异常:
        SpecificationError: 维数下界或同余条件不满足
        IllFormedQuotientError / SmoothSingularityError: 底类型不合格
        VerificationError: 阶数或 mld 的断言失败
    """
    base, epsilon = _prepare(spec)
    jobs = [(base, epsilon, spec.l, spec.n, N) for N in spec.orders]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_build_term_packed, jobs))
    return [_build_term_packed(job) for job in jobs]


def sequence_report(spec: SequenceSpec, workers: int = 1) -> SequenceReport:
    """构造序列并汇总极限、从上方趋近和极限点所在面的检查。"""
    base, epsilon = _prepare(spec)
    terms = construct_limit_sequence(spec, workers=workers)
    limit = epsilon + spec.l
    m = base.dimension
    zeros_expected = spec.n - m - spec.l
    constant = zeros_expected == limit

    T = _limit_point(base, spec.l, spec.n)
    signature = face_signature(T)
    on_face, _ = face_quotient(T)
    report = verify_from_above([t.verified_mld for t in terms], limit)

    faces_ok = (
        signature.ones == spec.l
        and signature.zeros == zeros_expected
        and (constant or signature.zeros >= spec.l + 1)
    )
    logger.info(
        f"sequence over {base} (l={spec.l}, n={spec.n}): {len(terms)} terms, limit {limit}, "
        f"{'constant' if constant else 'decreasing'}"
    )
    return SequenceReport(
        spec=spec,
        base=base,
        epsilon=epsilon,
        limit=limit,
        terms=terms,
        from_above=report,
        constant=constant,
        limit_point=T,
        limit_face=signature,
        face_quotient=on_face,
        face_reproduces_base=on_face == base,
        faces_ok=faces_ok,
    )
