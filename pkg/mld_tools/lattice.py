"""
=============================================================================
toricmld - 精确格运算模块 / Exact lattice primitives
=============================================================================

本文件实现了所有模块共用的精确有理格运算：

1. smith_normal_form - 整数矩阵的 Smith 标准形（带幺模变换 U, V）
2. LatticeBasis - 由有理基向量张成的满秩格
3. lattice_member - 格成员判定
4. primitive_generator - 射线上离原点最近的非零格点
5. enumerate_residues - 子格陪集代表元（约化到基本平行体）
6. lattice_from_generators / saturation_index - 生成元求基、面格指数

约定:
    - 向量是 Fraction 元组，LatticeBasis.basis 中每个元素是一个基向量
      （即基矩阵的一列）
    - 行列式、求逆和 Smith 分解都交给 sympy 做精确计算
    - 所有函数都是纯函数，可在并发环境中随意调用

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

from fractions import Fraction  # 精确有理数
from functools import lru_cache  # 缓存格基的逆矩阵
from itertools import product  # 遍历 Smith 盒子中的所有点
from math import gcd, lcm, prod  # 整数数论工具
from typing import List, NamedTuple, Sequence, Tuple

# =============================================================================
# 第三方库导入
# =============================================================================

import sympy  # 精确的有理矩阵行列式与求逆
from sympy import ZZ
from sympy.matrices.normalforms import smith_normal_decomp  # 带 U, V 的 Smith 分解
from loguru import logger  # 日志
from pydantic import BaseModel, ConfigDict, field_validator

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import (
    DimensionMismatchError,
    LatticeError,
    Matrix,
    Vector,
)


IntegerMatrix = Tuple[Tuple[int, ...], ...]


# =============================================================================
# Smith 标准形 (Smith normal form)
# =============================================================================

class SmithDecomposition(NamedTuple):
    """
    Smith 分解结果 U·M·V = S。

    属性:
        S (IntegerMatrix): 对角矩阵，对角元非负且 d_1 | d_2 | ...
        U (IntegerMatrix): 左幺模矩阵（行变换）
        V (IntegerMatrix): 右幺模矩阵（列变换）
    """

    S: IntegerMatrix
    U: IntegerMatrix
    V: IntegerMatrix

    @property
    def invariants(self) -> Tuple[int, ...]:
        """对角线上的不变因子 d_1, d_2, ..."""
        if not self.S:
            return ()
        return tuple(self.S[i][i] for i in range(min(len(self.S), len(self.S[0]))))


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _freeze(m: List[List[int]]) -> IntegerMatrix:
    return tuple(tuple(r) for r in m)


def smith_normal_form(M: Sequence[Sequence[int]]) -> SmithDecomposition:
    """
    计算整数矩阵的 Smith 标准形 / Smith normal form with transforms.

    参数:
        M: 任意形状的整数矩阵（行的序列）

    返回:
        SmithDecomposition: 满足 U·M·V = S，S 对角且 d_1 | d_2 | ...，
        对角元非负，det U = ±1，det V = ±1

    做法:
        交给 sympy 的 smith_normal_decomp 在 ZZ 上分解，再把负的对角元连同
        U 的对应行一起取反。

    示例:
        >>> smith_normal_form([[2, 0], [0, 3]]).S
        ((1, 0), (0, 6))
    """
    A = [[int(x) for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if any(len(row) != cols for row in A):
        raise DimensionMismatchError("matrix rows have different lengths")
    if rows == 0 or cols == 0:
        return SmithDecomposition(S=_freeze(A), U=_freeze(_identity(rows)), V=_freeze(_identity(cols)))

    S, U, V = smith_normal_decomp(sympy.Matrix(A), domain=ZZ)
    S = [[int(S[i, j]) for j in range(cols)] for i in range(rows)]
    U = [[int(U[i, j]) for j in range(rows)] for i in range(rows)]
    V = [[int(V[i, j]) for j in range(cols)] for i in range(cols)]
    for t in range(min(rows, cols)):
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-u for u in U[t]]
    return SmithDecomposition(S=_freeze(S), U=_freeze(U), V=_freeze(V))


def integer_inverse(U: Sequence[Sequence[int]]) -> IntegerMatrix:
    """幺模整数矩阵的精确逆矩阵。"""
    inv = sympy.Matrix(U).inv()
    return tuple(tuple(int(inv[i, j]) for j in range(inv.cols)) for i in range(inv.rows))


# =============================================================================
# 有理矩阵辅助函数 (sympy bridge)
# =============================================================================

def _to_sympy_columns(columns: Sequence[Vector]) -> sympy.Matrix:
    n = len(columns[0])
    return sympy.Matrix(
        n,
        len(columns),
        lambda i, j: sympy.Rational(columns[j][i].numerator, columns[j][i].denominator),
    )


def _from_sympy(m: sympy.Matrix) -> Matrix:
    return tuple(
        tuple(Fraction(int(m[i, j].p), int(m[i, j].q)) for j in range(m.cols))
        for i in range(m.rows)
    )


@lru_cache(maxsize=4096)
def _determinant(columns: Tuple[Vector, ...]) -> Fraction:
    d = _to_sympy_columns(columns).det()
    return Fraction(int(d.p), int(d.q))


@lru_cache(maxsize=4096)
def _inverse_rows(columns: Tuple[Vector, ...]) -> Matrix:
    return _from_sympy(_to_sympy_columns(columns).inv())


def _apply(rows: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in rows)


def combine(columns: Sequence[Vector], coefficients: Sequence[Fraction | int]) -> Vector:
    """返回 Σ coefficients[j] · columns[j]。"""
    n = len(columns[0])
    return tuple(
        sum((Fraction(c) * col[i] for c, col in zip(coefficients, columns)), Fraction(0))
        for i in range(n)
    )


def fractional_part(x: Fraction) -> Fraction:
    """{x} = x - floor(x)，对负数同样落在 [0, 1)。"""
    return x % 1


def clear_denominators(vectors: Sequence[Sequence[Fraction]]) -> Tuple[IntegerMatrix, int]:
    """
    把有理向量组乘以公分母化为整数。

    返回:
        (按列排放的整数矩阵（行的元组）, 公分母 D)
    """
    denominator = lcm(*(Fraction(x).denominator for v in vectors for x in v)) if vectors else 1
    n = len(vectors[0]) if vectors else 0
    matrix = tuple(
        tuple(int(Fraction(v[i]) * denominator) for v in vectors)
        for i in range(n)
    )
    return matrix, denominator


# =============================================================================
# 格基 (LatticeBasis)
# =============================================================================

class LatticeBasis(BaseModel):
    """
    满秩格 / Full-rank lattice given by a rational basis.

    属性:
        basis (Tuple[Vector, ...]): n 个基向量（基矩阵的列），行列式非零

    格就是这些基向量的整系数线性组合全体。
    """

    basis: Tuple[Vector, ...]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("basis", mode="before")
    @classmethod
    def _coerce(cls, value):
        return tuple(tuple(Fraction(x) for x in v) for v in value)

    @field_validator("basis")
    @classmethod
    def _check_square(cls, value):
        n = len(value)
        if n == 0:
            raise ValueError("lattice basis must contain at least one vector")
        if any(len(v) != n for v in value):
            raise ValueError(f"lattice basis must be {n}x{n}")
        if _determinant(value) == 0:
            raise ValueError("lattice basis is singular (determinant 0)")
        return value

    @classmethod
    def standard(cls, n: int) -> "LatticeBasis":
        """标准格 Z^n。"""
        return cls(basis=[[1 if i == j else 0 for i in range(n)] for j in range(n)])

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def determinant(self) -> Fraction:
        """基矩阵的行列式（带符号），其绝对值是基本平行体的体积。"""
        return _determinant(self.basis)

    def coordinates(self, v: Sequence[Fraction | int]) -> Vector:
        """v 在此基下的坐标（可能是有理数）。"""
        if len(v) != self.dimension:
            raise DimensionMismatchError(
                f"vector of dimension {len(v)} against lattice of dimension {self.dimension}"
            )
        return _apply(_inverse_rows(self.basis), [Fraction(x) for x in v])

    def point(self, coefficients: Sequence[Fraction | int]) -> Vector:
        """由基坐标还原环境空间中的向量。"""
        return combine(self.basis, coefficients)


def lattice_member(v: Sequence[Fraction | int], L: LatticeBasis) -> bool:
    """
    判断 v 是否是 L 的格点（基坐标全为整数）。

    异常:
        DimensionMismatchError: 维数不一致
    """
    return all(c.denominator == 1 for c in L.coordinates(v))


def primitive_generator(v: Sequence[Fraction | int], L: LatticeBasis) -> Vector:
    """
    返回射线 R≥0·v 上离原点最近的非零格点。

    做法:
        设 v 在 L 中的坐标为 c = w/D（w 为整数向量，D 为公分母），g = gcd(w)。
        t·v ∈ L 当且仅当 t·g/D ∈ Z，所以最小的正 t 是 D/g，不需要搜索。

    异常:
        LatticeError: v 是零向量
    """
    coords = L.coordinates(v)
    denominator = lcm(*(c.denominator for c in coords))
    content = gcd(*(int(c * denominator) for c in coords))
    if content == 0:
        raise LatticeError("the zero vector does not span a ray")
    t = Fraction(denominator, content)
    return tuple(t * Fraction(x) for x in v)


def lattice_from_generators(vectors: Sequence[Sequence[Fraction | int]]) -> LatticeBasis:
    """
    由一组（可能冗余的）生成元求格基。

    做法:
        清分母得整数矩阵 G（列为生成元），Smith 分解 U·G·V = S，
        则 G 的列张成的格等于 U^{-1}·diag(d_1..d_n) 的列张成的格。

    异常:
        LatticeError: 生成元不张成满维空间
    """
    if not vectors:
        raise LatticeError("no generators given")
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise DimensionMismatchError("generators have different dimensions")
    G, denominator = clear_denominators([[Fraction(x) for x in v] for v in vectors])
    decomposition = smith_normal_form(G)
    invariants = decomposition.invariants
    if len(invariants) < n or any(d == 0 for d in invariants):
        raise LatticeError("generators do not span the ambient space")
    U_inv = integer_inverse(decomposition.U)
    basis = [
        tuple(Fraction(U_inv[i][j] * invariants[j], denominator) for i in range(n))
        for j in range(n)
    ]
    return LatticeBasis(basis=basis)


# =============================================================================
# 子格与陪集 (Sub-lattices and residues)
# =============================================================================

def relative_matrix(L: LatticeBasis, vectors: Sequence[Sequence[Fraction | int]]) -> IntegerMatrix:
    """
    vectors 在 L 的基下的整数坐标矩阵（列为各向量）。

    异常:
        LatticeError: 某个向量不在 L 中
    """
    columns = []
    for v in vectors:
        coords = L.coordinates(v)
        if any(c.denominator != 1 for c in coords):
            raise LatticeError(f"vector {tuple(str(x) for x in v)} is not a point of the lattice")
        columns.append([int(c) for c in coords])
    n = L.dimension
    return tuple(tuple(col[i] for col in columns) for i in range(n))


def sublattice_index(L: LatticeBasis, P: LatticeBasis) -> int:
    """[L : P] = |det P| / |det L|（要求 P ⊆ L）。"""
    relative_matrix(L, P.basis)
    ratio = abs(P.determinant / L.determinant)
    if ratio.denominator != 1:
        raise LatticeError("determinant ratio is not an integer")
    return int(ratio)


def saturation_index(L: LatticeBasis, vectors: Sequence[Sequence[Fraction | int]]) -> int:
    """
    ⟨vectors⟩ 在面格 L ∩ span(vectors) 中的指数。

    vectors 必须线性无关且都在 L 中；指数等于其坐标矩阵的不变因子之积。
    """
    if not vectors:
        return 1
    decomposition = smith_normal_form(relative_matrix(L, vectors))
    invariants = decomposition.invariants
    if any(d == 0 for d in invariants):
        raise LatticeError("face vectors are linearly dependent")
    return prod(invariants)


def reduce_to_parallelepiped(v: Sequence[Fraction], P: LatticeBasis) -> Vector:
    """把 v 约化到 P 的半开基本平行体中（P 坐标取分数部分）。"""
    return P.point([fractional_part(c) for c in P.coordinates(v)])


def enumerate_residues(L: LatticeBasis, P: LatticeBasis) -> List[Vector]:
    """
    枚举商群 L/P 的全部陪集代表元。

    参数:
        L (LatticeBasis): 大格
        P (LatticeBasis): 子格，每个基向量都必须在 L 中

    返回:
        List[Vector]: 每个陪集恰好一个代表元，均约化到 P 的半开基本平行体，
        按字典序排列；长度等于 |det P| / |det L|

    做法:
        M = P 在 L 基下的整数坐标矩阵，Smith 分解 U·M·V = S 给出
        Z^n / M·Z^n ≅ ⊕ Z/d_i，代表元为 U^{-1}·y，y 遍历盒子 Π[0, d_i)。

    异常:
        LatticeError: P 不包含于 L
    """
    if L.dimension != P.dimension:
        raise DimensionMismatchError("lattice and sub-lattice have different dimensions")
    M = relative_matrix(L, P.basis)
    decomposition = smith_normal_form(M)
    invariants = decomposition.invariants
    U_inv = integer_inverse(decomposition.U)
    n = L.dimension

    residues = set()
    for y in product(*(range(d) for d in invariants)):
        x = [sum(U_inv[i][j] * y[j] for j in range(n)) for i in range(n)]
        residues.add(reduce_to_parallelepiped(L.point(x), P))

    expected = sublattice_index(L, P)
    if len(residues) != expected or prod(invariants) != expected:
        raise LatticeError(
            f"residue count {len(residues)} disagrees with index {expected}"
        )
    logger.debug(f"enumerated {expected} residues (invariants {invariants})")
    return sorted(residues)
