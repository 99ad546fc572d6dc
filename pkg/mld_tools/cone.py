"""
=============================================================================
toricmld - 单纯环面锥模块 / Simplicial toric cones
=============================================================================

本文件实现一般单纯环面奇点的组合计算：

1. SimplicialConeData - 格 + n 条线性无关射线
2. primitive_rays / functional - 本原射线点 P_i 与 Q-Gorenstein 线性函数 F
3. is_regular_subcone - 子锥正则性（P_S 生成面格）
4. scan_residues / mld_toric - 格点判别下的最小对数偏差（独立校验）
5. reduce_to_cyclic - 把单纯环面数据约化为循环商，并验证 mld 不变

格点判别:
    mld = 非正则子锥内部格点上 F 的最小值；
    所有子锥（包括整个锥）都正则时 X 光滑，最小偏差无定义。
    只需检查基本平行体中的非零陪集代表元：平行体外的点 F 值更大。

子锥编号一律从 1 开始，与射线在输入中的顺序一致。

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

from fractions import Fraction
from math import lcm
from typing import Dict, FrozenSet, Iterable, List, Tuple

# =============================================================================
# 第三方库导入
# =============================================================================

from loguru import logger
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import (
    SmoothSingularityError,
    SpecificationError,
    Vector,
    VerificationError,
)
from mld_tools.lattice import (
    LatticeBasis,
    enumerate_residues,
    lattice_from_generators,
    lattice_member,
    primitive_generator,
    saturation_index,
)
from mld_tools.quotient import (
    MldResult,
    NormalizationTrace,
    QuotientType,
    Singular,
    Smooth,
    generating_point,
    mld,
    normalize,
)


# =============================================================================
# 数据模型 (Domain types)
# =============================================================================

class SimplicialConeData(BaseModel):
    """
    满维单纯锥及其格。

    属性:
        lattice (LatticeBasis): 环境格 N
        rays (Tuple[Vector, ...]): n 条线性无关射线上的格点

    射线张成真子空间的退化输入在构造时即被拒绝。
    """

    lattice: LatticeBasis
    rays: Tuple[Vector, ...]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("rays", mode="before")
    @classmethod
    def _coerce(cls, value):
        return tuple(tuple(Fraction(x) for x in v) for v in value)

    @model_validator(mode="after")
    def _check(self) -> "SimplicialConeData":
        n = self.lattice.dimension
        if len(self.rays) != n or any(len(r) != n for r in self.rays):
            raise ValueError(f"a simplicial cone in dimension {n} needs exactly {n} rays of dimension {n}")
        try:
            LatticeBasis(basis=self.rays)
        except ValueError as exc:
            raise ValueError("rays are linearly dependent: the cone is not full-dimensional") from exc
        for ray in self.rays:
            if not lattice_member(ray, self.lattice):
                raise ValueError(f"ray {[str(x) for x in ray]} is not a lattice point")
        return self

    @property
    def dimension(self) -> int:
        return self.lattice.dimension


class QGorensteinFunctional(BaseModel):
    """线性函数 F，满足对每个本原射线点 F(P_i) = 1。"""

    coefficients: Vector

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def __call__(self, v: Iterable[Fraction]) -> Fraction:
        return sum((a * Fraction(b) for a, b in zip(self.coefficients, v)), Fraction(0))


class ResidueRecord(BaseModel):
    """
    一个非零陪集代表元的扫描记录。

    属性:
        point: 环境坐标
        coords: P 基下的坐标，均在 [0, 1) 内
        support: 非零 P 坐标的编号（从 1 开始）
        value: F(point) = Σ coords
        competes: 所在面是否非正则（即是否参与取最小值）
    """

    point: Vector
    coords: Vector
    support: Tuple[int, ...]
    value: Fraction
    competes: bool

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ReductionTrace(BaseModel):
    """
    reduce_to_cyclic 的记录。

    属性:
        witness: 达到 mld 的格点 x
        support: x 的支撑（从 1 开始）
        raw: 粗化格 Z⟨P_S⟩ + Z·x 给出的原始循环商
        normalization: raw 的规范化记录
        mld_log: 锥与约化结果共同的 mld
        verified: 约化结果的 mld 与锥的 mld 完全一致
    """

    witness: Vector
    support: Tuple[int, ...]
    raw: QuotientType
    normalization: NormalizationTrace
    mld_log: Fraction
    verified: bool

    model_config = ConfigDict(arbitrary_types_allowed=True)


# =============================================================================
# 构造 (Constructors)
# =============================================================================

def induced_cone(q: QuotientType) -> SimplicialConeData:
    """
    循环商 q 诱导的锥：射线 e_i，格 Z^n + Z·(a/N)。

    q 不必良构，这正是规范化不变性校验所需要的"原始格"。
    """
    n = q.dimension
    if n == 0:
        raise SpecificationError("the trivial type has no cone to induce")
    units = [tuple(Fraction(1 if i == j else 0) for i in range(n)) for j in range(n)]
    lattice = lattice_from_generators(units + [generating_point(q).coords])
    return SimplicialConeData(lattice=lattice, rays=units)


# =============================================================================
# 射线与线性函数
# =============================================================================

def primitive_rays(c: SimplicialConeData) -> List[Vector]:
    """每条射线上离原点最近的格点 P_i。"""
    return [primitive_generator(ray, c.lattice) for ray in c.rays]


def _ray_basis(c: SimplicialConeData) -> LatticeBasis:
    return LatticeBasis(basis=primitive_rays(c))


def functional(c: SimplicialConeData) -> QGorensteinFunctional:
    """
    唯一满足 F(P_i) = 1 的线性函数。

    F 在 P 基下的坐标全是 1，所以系数向量是 (1, ..., 1)·B_P^{-1}。
    """
    P = _ray_basis(c)
    n = c.dimension
    coefficients = tuple(
        sum(
            (P.coordinates([1 if t == j else 0 for t in range(n)])[i] for i in range(n)),
            Fraction(0),
        )
        for j in range(n)
    )
    F = QGorensteinFunctional(coefficients=coefficients)
    for ray in P.basis:
        if F(ray) != 1:
            raise VerificationError("Q-Gorenstein functional does not take value 1 on a ray")
    return F


def is_regular_subcone(c: SimplicialConeData, support: Iterable[int]) -> bool:
    """
    子锥 S 是否正则：{P_i : i ∈ S} 是否生成面格 N ∩ span(S)。

    参数:
        support: 射线编号集合（从 1 开始），非空；整个锥也算一个子锥
    """
    indices = sorted(set(support))
    if not indices:
        raise SpecificationError("a subcone needs at least one ray")
    if indices[0] < 1 or indices[-1] > c.dimension:
        raise SpecificationError(f"ray indices must lie in 1..{c.dimension}")
    rays = primitive_rays(c)
    return saturation_index(c.lattice, [rays[i - 1] for i in indices]) == 1


def toric_gorenstein_index(c: SimplicialConeData) -> int:
    """F 在格点上取值的最小公分母（F 线性，只需看格基）。"""
    F = functional(c)
    return lcm(1, *(F(b).denominator for b in c.lattice.basis))


# =============================================================================
# 最小对数偏差（格点判别）
# =============================================================================

def scan_residues(c: SimplicialConeData) -> List[ResidueRecord]:
    """
    扫描 N / ⟨P_i⟩ 的全部非零陪集代表元（约化到 P 的基本平行体）。

    返回按环境坐标字典序排列的记录。
    """
    P = _ray_basis(c)
    regular: Dict[FrozenSet[int], bool] = {}
    records = []
    for point in enumerate_residues(c.lattice, P):
        coords = P.coordinates(point)
        support = tuple(i for i, x in enumerate(coords, start=1) if x != 0)
        if not support:
            continue
        key = frozenset(support)
        if key not in regular:
            regular[key] = is_regular_subcone(c, support)
        records.append(
            ResidueRecord(
                point=point,
                coords=coords,
                support=support,
                value=sum(coords, Fraction(0)),
                competes=not regular[key],
            )
        )
    return records


def mld_toric(c: SimplicialConeData) -> MldResult:
    """
    格点判别下的最小对数偏差 / mld by the lattice-point criterion.

    候选点是支撑面非正则的非零陪集代表元，取 F 的最小值，
    并列时取字典序最小的代表元作为见证。没有候选且全部子锥正则时返回 Smooth。
    """
    records = scan_residues(c)
    competitors = [r for r in records if r.competes]
    excluded = len(records) - len(competitors)
    if excluded:
        logger.debug(f"regularity filter excluded {excluded} of {len(records)} residues")
    if not competitors:
        if records or not is_regular_subcone(c, range(1, c.dimension + 1)):
            raise VerificationError("non-regular cone without a competing lattice point")
        return Smooth()
    best = min(competitors, key=lambda r: (r.value, r.point))
    return Singular(mld_log=best.value, witness_point=best.point)


# =============================================================================
# 约化到循环商 (Reduction to a cyclic quotient)
# =============================================================================

def reduce_to_cyclic(c: SimplicialConeData) -> Tuple[QuotientType, ReductionTrace]:
    """
    把单纯环面奇点约化为 mld 相同的循环商。

    步骤:
        1. 取 mld_toric 的见证 x 及其支撑 S
        2. 限制到子空间 W = span(P_i : i ∈ S)
        3. 粗化格 N' = Z⟨P_i : i ∈ S⟩ + Z·x，商群由 x 的像生成，阶为 x 的 P 坐标的
           最小公分母 N'；权重 = N' × (x 的 P 坐标)
        4. 规范化后计算 mld，与锥的 mld 比较

    异常:
        SmoothSingularityError: 输入光滑
        VerificationError: 约化结果的 mld 与锥不一致（不会静默返回）
    """
    result = mld_toric(c)
    if result.is_smooth:
        raise SmoothSingularityError("smooth — minimal discrepancy undefined")

    P = _ray_basis(c)
    coords = P.coordinates(result.witness_point)
    support = tuple(i for i, x in enumerate(coords, start=1) if x != 0)
    restricted = [coords[i - 1] for i in support]
    order = lcm(*(x.denominator for x in restricted))
    raw = QuotientType(order=order, weights=tuple(int(x * order) for x in restricted))
    reduced, normalization = normalize(raw)

    reduced_mld = mld(reduced)
    if reduced_mld.is_smooth or reduced_mld.mld_log != result.mld_log:
        raise VerificationError(
            f"reduction of the cone produced {reduced} whose mld differs from "
            f"the cone's {result.mld_log}"
        )
    trace = ReductionTrace(
        witness=result.witness_point,
        support=support,
        raw=raw,
        normalization=normalization,
        mld_log=result.mld_log,
        verified=True,
    )
    logger.info(f"reduced cone of dimension {c.dimension} to {reduced} (mld {result.mld_log})")
    return reduced, trace

