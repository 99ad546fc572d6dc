"""
=============================================================================
toricmld - 文件读写模块 / File formats
=============================================================================

本文件实现项目用到的全部文本格式：

1. read_cone_file / parse_cone_text / write_cone_file - 单纯锥输入文件
2. SpectrumRow - 谱文件中的一行记录
3. write_spectrum_csv / read_spectrum_csv - CSV 格式的谱
4. write_spectrum_json / read_spectrum_json - JSON 格式的谱
5. read_text / write_text - 带错误映射的底层文件读写

锥文件语法（按行，# 之后为注释，空行忽略）：

    dim <n>
    lattice          后接恰好 n 个基向量，每行一个
    | generators     后接至少 n 个生成向量，每行一个
    rays             后接恰好 n 条射线向量，每行一个

向量分量用空白分隔，只能是整数或 p/q。所有读取函数都拒绝浮点数，
出错时报告行号（CSV、锥文件）或条目序号（JSON）。

作者: toricmld Team
版本: 1.0.0
=============================================================================
"""

# =============================================================================
# 标准库导入
# =============================================================================

import csv              # 谱的 CSV 格式
import io               # 内存中的 CSV 缓冲
import json             # 谱的 JSON 格式
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

# =============================================================================
# 第三方库导入
# =============================================================================

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

# =============================================================================
# 项目内部模块导入
# =============================================================================

from mld_tools.base import (
    LatticeError,
    ParseError,
    PersistenceError,
    Vector,
    parse_integer,
    parse_rational,
    render_rational,
)
from mld_tools.cone import SimplicialConeData
from mld_tools.lattice import LatticeBasis, lattice_from_generators
from mld_tools.quotient import SingularityClass


# =============================================================================
# 底层读写 (Raw file access)
# =============================================================================

def read_text(path: Path) -> str:
    """
    读取 UTF-8 文本文件。

    异常:
        PersistenceError: 文件不存在、是目录或无读权限
    """
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise PersistenceError(f"cannot read {path}: {exc}") from exc


def write_text(path: Path, content: str) -> None:
    """写入 UTF-8 文本文件，自动创建父目录；换行符固定为 \\n。"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(content)
    except OSError as exc:
        raise PersistenceError(f"cannot write {path}: {exc}") from exc
    logger.debug(f"wrote {len(content)} bytes to {path}")


# =============================================================================
# 锥文件 (Cone files)
# =============================================================================

_SECTIONS = ("lattice", "generators", "rays")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_vector(text: str, n: int, line: int) -> Vector:
    tokens = text.split()
    if len(tokens) != n:
        raise ParseError(f"expected {n} entries, found {len(tokens)}", line=line)
    return tuple(parse_rational(token, line=line) for token in tokens)


def parse_cone_text(text: str) -> SimplicialConeData:
    """
    解析锥文件内容。

    异常:
        ParseError: 语法错误（附带行号）
        LatticeError: 基矩阵奇异、生成元不满秩、射线退化或不在格中
    """
    n: Optional[int] = None
    section: Optional[str] = None
    vectors = {name: [] for name in _SECTIONS}
    last_line = 0

    for number, raw in enumerate(text.splitlines(), start=1):
        last_line = number
        line = _strip(raw)
        if not line:
            continue
        head = line.split()[0]
        if head == "dim":
            if n is not None:
                raise ParseError("dimension declared twice", line=number)
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'dim <n>'", line=number)
            n = parse_integer(parts[1], line=number)
            if n < 1:
                raise ParseError(f"dimension must be positive, got {n}", line=number)
            continue
        if head in _SECTIONS:
            if n is None:
                raise ParseError(f"section '{head}' before 'dim'", line=number)
            if len(line.split()) != 1:
                raise ParseError(f"section header '{head}' takes no arguments", line=number)
            if vectors[head]:
                raise ParseError(f"section '{head}' given twice", line=number)
            section = head
            continue
        if section is None:
            raise ParseError(f"unexpected line {line!r}", line=number)
        if section == "lattice" and len(vectors["lattice"]) == n:
            raise ParseError(f"'lattice' takes exactly {n} vectors", line=number)
        if section == "rays" and len(vectors["rays"]) == n:
            raise ParseError(f"'rays' takes exactly {n} vectors", line=number)
        vectors[section].append(_parse_vector(line, n, number))

    if n is None:
        raise ParseError("missing 'dim <n>' declaration", line=last_line or None)
    if vectors["lattice"] and vectors["generators"]:
        raise ParseError("give either 'lattice' or 'generators', not both", line=last_line)
    if len(vectors["rays"]) != n:
        raise ParseError(f"expected {n} ray vectors, found {len(vectors['rays'])}", line=last_line)

    try:
        if vectors["generators"]:
            if len(vectors["generators"]) < n:
                raise ParseError(f"'generators' needs at least {n} vectors", line=last_line)
            lattice = lattice_from_generators(vectors["generators"])
        elif len(vectors["lattice"]) == n:
            lattice = LatticeBasis(basis=vectors["lattice"])
        elif not vectors["lattice"]:
            lattice = LatticeBasis.standard(n)
        else:
            raise ParseError(f"'lattice' takes exactly {n} vectors", line=last_line)
        return SimplicialConeData(lattice=lattice, rays=vectors["rays"])
    except ValidationError as exc:
        raise LatticeError(exc.errors()[0]["msg"]) from exc


def read_cone_file(path: Path) -> SimplicialConeData:
    """从文件读取锥数据。"""
    cone = parse_cone_text(read_text(path))
    logger.debug(f"read cone of dimension {cone.dimension} from {path}")
    return cone


def format_cone(cone: SimplicialConeData) -> str:
    """把锥写成 lattice 形式的文本。"""
    lines = [f"dim {cone.dimension}", "lattice"]
    lines += [" ".join(render_rational(x) for x in v) for v in cone.lattice.basis]
    lines.append("rays")
    lines += [" ".join(render_rational(x) for x in v) for v in cone.rays]
    return "\n".join(lines) + "\n"


def write_cone_file(cone: SimplicialConeData, path: Path) -> None:
    write_text(path, format_cone(cone))


# =============================================================================
# 谱文件 (Spectrum files)
# =============================================================================

SPECTRUM_HEADER = ["dim", "N", "weights", "mld_num", "mld_den", "class", "index", "multiplicity"]


class SpectrumRow(BaseModel):
    """
    谱文件中的一行：一个 mld 值、它的见证类型和重数。

    属性:
        dim / order / weights: 见证类型 1/N(a_1, ..., a_n)
        mld_log: 精确的最小对数偏差
        singularity_class: terminal / canonical-not-terminal / klt-not-canonical
        index: 见证的 Gorenstein 指数
        multiplicity: 达到该值的规范形类型个数
    """

    dim: int = Field(..., ge=1)
    order: int = Field(..., ge=2)
    weights: Tuple[int, ...]
    mld_log: Fraction
    singularity_class: SingularityClass
    index: int = Field(..., ge=1)
    multiplicity: int = Field(..., ge=1)

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _class_from_text(text: str, line: Optional[int]) -> SingularityClass:
    try:
        return SingularityClass(text)
    except ValueError as exc:
        raise ParseError(f"unknown singularity class {text!r}", line=line) from exc


def _build_row(fields: dict, line: Optional[int]) -> SpectrumRow:
    if len(fields["weights"]) != fields["dim"]:
        raise ParseError(
            f"dim {fields['dim']} does not match {len(fields['weights'])} weights", line=line
        )
    try:
        return SpectrumRow(**fields)
    except ValidationError as exc:
        raise ParseError(exc.errors()[0]["msg"], line=line) from exc


def spectrum_to_csv(rows: Sequence[SpectrumRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SPECTRUM_HEADER)
    for row in rows:
        writer.writerow([
            row.dim,
            row.order,
            ",".join(str(a) for a in row.weights),
            row.mld_log.numerator,
            row.mld_log.denominator,
            row.singularity_class.value,
            row.index,
            row.multiplicity,
        ])
    return buffer.getvalue()


def spectrum_from_csv(text: str) -> List[SpectrumRow]:
    """
    解析 CSV 格式的谱。

    异常:
        ParseError: 表头不符、列数错误、出现浮点数等（附带行号）
    """
    reader = csv.reader(io.StringIO(text))
    rows = []
    header_seen = False
    for record in reader:
        line = reader.line_num
        if not record:
            continue
        if not header_seen:
            if record != SPECTRUM_HEADER:
                raise ParseError(f"expected header {','.join(SPECTRUM_HEADER)}", line=line)
            header_seen = True
            continue
        if len(record) != len(SPECTRUM_HEADER):
            raise ParseError(f"expected {len(SPECTRUM_HEADER)} columns, found {len(record)}", line=line)
        dim, order, weights, num, den, klass, index, multiplicity = record
        denominator = parse_integer(den, line=line)
        if denominator <= 0:
            raise ParseError(f"mld denominator must be positive, got {denominator}", line=line)
        rows.append(_build_row({
            "dim": parse_integer(dim, line=line),
            "order": parse_integer(order, line=line),
            "weights": tuple(parse_integer(a, line=line) for a in weights.split(",")),
            "mld_log": Fraction(parse_integer(num, line=line), denominator),
            "singularity_class": _class_from_text(klass, line),
            "index": parse_integer(index, line=line),
            "multiplicity": parse_integer(multiplicity, line=line),
        }, line))
    if not header_seen:
        raise ParseError("empty spectrum file: header missing", line=1)
    return rows


def spectrum_to_json(rows: Sequence[SpectrumRow], indent: Optional[int] = None) -> str:
    payload = [
        {
            "dim": row.dim,
            "N": row.order,
            "weights": list(row.weights),
            "mld_log": render_rational(row.mld_log),
            "class": row.singularity_class.value,
            "index": row.index,
            "multiplicity": row.multiplicity,
        }
        for row in rows
    ]
    return json.dumps(payload, indent=indent, ensure_ascii=False) + "\n"


def _json_int(value, entry: int, name: str) -> int:
    # bool 是 int 的子类，需要单独排除
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"entry {entry}: field {name!r} must be an integer, got {value!r}")
    return value


def spectrum_from_json(text: str) -> List[SpectrumRow]:
    """
    解析 JSON 格式的谱；mld_log 必须是 "p/q" 字符串。

    异常:
        ParseError: JSON 语法错误或字段非法（附带条目序号，从 1 开始）
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(payload, list):
        raise ParseError("spectrum JSON must be a list of entries")
    rows = []
    for entry, item in enumerate(payload, start=1):
        if not isinstance(item, dict):
            raise ParseError(f"entry {entry}: expected an object")
        missing = {"dim", "N", "weights", "mld_log", "class", "index", "multiplicity"} - item.keys()
        if missing:
            raise ParseError(f"entry {entry}: missing fields {sorted(missing)}")
        if not isinstance(item["mld_log"], str):
            raise ParseError(f"entry {entry}: mld_log must be a \"p/q\" string, got {item['mld_log']!r}")
        if not isinstance(item["weights"], list):
            raise ParseError(f"entry {entry}: weights must be a list")
        try:
            mld_log = parse_rational(item["mld_log"])
        except ParseError as exc:
            raise ParseError(f"entry {entry}: {exc}") from exc
        rows.append(_build_row({
            "dim": _json_int(item["dim"], entry, "dim"),
            "order": _json_int(item["N"], entry, "N"),
            "weights": tuple(_json_int(a, entry, "weights") for a in item["weights"]),
            "mld_log": mld_log,
            "singularity_class": _class_from_text(str(item["class"]), None),
            "index": _json_int(item["index"], entry, "index"),
            "multiplicity": _json_int(item["multiplicity"], entry, "multiplicity"),
        }, None))
    return rows


def write_spectrum_csv(rows: Sequence[SpectrumRow], path: Path) -> None:
    write_text(path, spectrum_to_csv(rows))


def read_spectrum_csv(path: Path) -> List[SpectrumRow]:
    return spectrum_from_csv(read_text(path))


def write_spectrum_json(rows: Sequence[SpectrumRow], path: Path, indent: Optional[int] = None) -> None:
    write_text(path, spectrum_to_json(rows, indent=indent))


def read_spectrum_json(path: Path) -> List[SpectrumRow]:
    return spectrum_from_json(read_text(path))
