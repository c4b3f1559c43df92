"""
Dehn 不變量模組 - 計算測地二面角多面體的 Dehn 不變量，並判定剪拼等價

V[θ] 只看基底座標：tπ 部分丟掉，其餘以邊長與邊數加權相加。
"""
import json
import os
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import sympy
import yaml

from .config import ARCHIMEDEAN_YAML
from .decomposer import AngleCombo, combo_eval, decompose, parse_angle, parse_combo
from .errors import DomainError, ParseError
from .logger import get_logger

logger = get_logger(__name__)

SNUB_NAMES = ("snub cube", "snub dodecahedron")
VOLUME_EQUAL = "equal"
VOLUME_UNEQUAL = "unequal"
VOLUME_UNKNOWN = "unknown"

_VOLUME_RE = re.compile(r"^(?:sqrt|[\d\s+\-*/()])+$")
_ANGLE_PREFIXES = ("ang", "sin2", "cos2", "tan", "cot2", "sec2", "csc2")


# ─── 型別 ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Edge:
    """一個邊軌道：count 條長度 length、二面角 dihedral 的邊"""
    length: Fraction
    count: int
    dihedral: AngleCombo

    def __post_init__(self):
        object.__setattr__(self, "length", Fraction(self.length))
        if self.length <= 0:
            raise DomainError(f"邊長必須為正，收到 {self.length}")
        if not isinstance(self.count, int) or self.count < 1:
            raise DomainError(f"邊數必須是正整數，收到 {self.count!r}")
        value = combo_eval(self.dihedral, 64)
        pi = combo_eval(AngleCombo(Fraction(1)), 64)
        if value.sign() <= 0 or (pi - value).sign() <= 0:
            raise DomainError(f"二面角 {self.dihedral} 不在 (0, π) 之內")

    def to_dict(self) -> dict:
        return {"length": str(self.length), "count": self.count, "dihedral": self.dihedral.to_dict()}


@dataclass(frozen=True)
class Polyhedron:
    """邊軌道清單與（可選的）精確體積"""
    name: str
    edges: tuple
    volume: object = None

    def __post_init__(self):
        if not self.edges:
            raise DomainError(f"多面體 {self.name!r} 沒有任何邊")

    def scaled(self, k) -> "Polyhedron":
        """所有邊長乘上 k，體積乘上 k³"""
        k = Fraction(k)
        if k <= 0:
            raise DomainError(f"縮放倍數必須為正，收到 {k}")
        edges = tuple(replace(e, length=e.length * k) for e in self.edges)
        volume = None if self.volume is None else self.volume * sympy.Rational(k.numerator, k.denominator) ** 3
        return Polyhedron(f"{k}*{self.name}" if k != 1 else self.name, edges, volume)

    def union(self, other: "Polyhedron", name: str = None) -> "Polyhedron":
        """不相交聯集：邊清單串接，體積相加"""
        volume = None
        if self.volume is not None and other.volume is not None:
            volume = self.volume + other.volume
        return Polyhedron(name or f"{self.name} + {other.name}", self.edges + other.edges, volume)

    def with_volume(self, volume) -> "Polyhedron":
        return Polyhedron(self.name, self.edges, parse_volume(volume))


@dataclass(frozen=True)
class DehnVector:
    """{BasisKey: 有理係數}，不含 0 與 π 分量"""
    entries: tuple = field(default=())

    @classmethod
    def build(cls, mapping) -> "DehnVector":
        cleaned = {k: Fraction(v) for k, v in dict(mapping).items() if v != 0}
        return cls(tuple(sorted(cleaned.items(), key=lambda kv: kv[0].sort_key)))

    @property
    def mapping(self) -> dict:
        return dict(self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other):
        merged = self.mapping
        for k, c in other.entries:
            merged[k] = merged.get(k, 0) + c
        return DehnVector.build(merged)

    def __neg__(self):
        return DehnVector(tuple((k, -c) for k, c in self.entries))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "DehnVector":
        factor = Fraction(factor)
        return DehnVector.build({k: c * factor for k, c in self.entries})

    def to_text(self) -> str:
        """-60*<3>_5 + 30*<5>_1 的格式；零向量為 0"""
        if self.is_zero:
            return "0"
        out = ""
        for k, c in self.entries:
            sign = "-" if c < 0 else "+"
            body = f"{abs(c)}*{k}"
            out += (f" {sign} " if out else ("-" if sign == "-" else "")) + body
        return out

    def to_dict(self) -> dict:
        return {"terms": [{"p": k.p, "d": k.d, "coeff": str(c)} for k, c in self.entries]}

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class Verdict:
    """剪拼等價判定：answer 為 YES、NO 或 CONDITIONAL"""
    dehn_left: DehnVector
    dehn_right: DehnVector
    dehn_equal: bool
    volume_status: str
    answer: str

    def to_dict(self) -> dict:
        return {
            "dehn_left": self.dehn_left.to_dict(),
            "dehn_right": self.dehn_right.to_dict(),
            "dehn_equal": self.dehn_equal,
            "volume_status": self.volume_status,
            "answer": self.answer,
        }


# ─── 體積與二面角解析 ──────────────────────────────────────────────────────

def parse_volume(value):
    """
    把體積描述轉成 sympy 運算式

    Args:
        value: None、有理數、sympy 運算式，或只含數字、四則運算與 sqrt 的文字

    Returns:
        sympy.Expr | None
    """
    if value is None:
        return None
    if isinstance(value, sympy.Basic):
        expr = value
    elif isinstance(value, (int, Fraction)):
        value = Fraction(value)
        expr = sympy.Rational(value.numerator, value.denominator)
    else:
        text = str(value).strip()
        if not text or not _VOLUME_RE.match(text):
            raise ParseError(f"體積運算式只能含數字、+ - * / ( ) 與 sqrt，收到 {text!r}")
        try:
            expr = sympy.sympify(text, rational=True)
        except (sympy.SympifyError, SyntaxError, TypeError) as e:
            raise ParseError(f"無法解析體積 {text!r}：{e}") from e
    if expr.is_positive is False:
        raise DomainError(f"體積必須為正，收到 {expr}")
    return expr


def parse_dihedral(value) -> AngleCombo:
    """含 <p>_d 或 pi 的文字視為基底運算式，其餘視為角度描述再分解"""
    if isinstance(value, AngleCombo):
        return value
    if isinstance(value, dict) and "t" in value:
        return AngleCombo.from_dict(value)
    if isinstance(value, str) and not value.strip().startswith(_ANGLE_PREFIXES) and ("<" in value or "pi" in value):
        return parse_combo(value)
    return decompose(parse_angle(value))


def _edge_from_dict(raw: dict) -> Edge:
    try:
        length = Fraction(str(raw.get("length", 1)))
        count = int(raw["count"])
        dihedral = raw["dihedral"]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"無法解析邊軌道 {raw!r}：{e}") from e
    return Edge(length, count, parse_dihedral(dihedral))


# ─── 內建資料集 ──────────────────────────────────────────────────────────

def normalize_name(name: str) -> str:
    return " ".join(re.split(r"[\s_\-]+", name.strip().lower()))


@lru_cache(maxsize=None)
def _load_dataset(yaml_path: str) -> dict:
    if not os.path.exists(yaml_path):
        raise DomainError(f"找不到多面體資料集：{yaml_path}")
    with open(yaml_path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}

    solids = {}
    for name, cfg in raw.items():
        edges = tuple(_edge_from_dict(e) for e in cfg.get("edges", []))
        solids[normalize_name(name)] = Polyhedron(normalize_name(name), edges, parse_volume(cfg.get("volume")))
    logger.info(f"✅ 載入 {len(solids)} 個內建多面體")
    return solids


def archimedean_names(yaml_path: str = ARCHIMEDEAN_YAML) -> list[str]:
    """資料集中的名稱（保持檔案順序）"""
    return list(_load_dataset(yaml_path))


def archimedean(name: str, yaml_path: str = ARCHIMEDEAN_YAML) -> Polyhedron:
    """
    取得內建的單位邊長多面體

    Args:
        name: 名稱，大小寫、底線與連字號皆可（例如 truncated_tetrahedron）

    Returns:
        Polyhedron
    """
    key = normalize_name(name)
    if key in SNUB_NAMES:
        raise DomainError(f"{key} 的二面角不是測地角，不在資料集內")
    solids = _load_dataset(yaml_path)
    if key not in solids:
        raise DomainError(f"未知的多面體 {name!r}，可用名稱：{', '.join(solids)}")
    return solids[key]


def load_polyhedron(path: str) -> Polyhedron:
    """
    讀取多面體 JSON

    格式：{"name": ..., "volume": {"kind": "rational"|"symbolic", "value": ...} | null,
           "edges": [{"length": "p/q", "count": 6, "dihedral": "pi - 2*<3>_2"}]}
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise DomainError(f"無法讀取多面體檔案 {path}：{e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"多面體檔案 {path} 不是合法 JSON：{e}") from e
    if not isinstance(raw, dict):
        raise ParseError(f"多面體檔案 {path} 必須是 JSON 物件")

    volume = raw.get("volume")
    if volume is not None:
        kind = volume.get("kind") if isinstance(volume, dict) else None
        if kind not in ("rational", "symbolic"):
            raise ParseError(f"volume.kind 必須是 rational 或 symbolic，收到 {kind!r}")
        volume = Fraction(str(volume.get("value"))) if kind == "rational" else volume.get("value")

    edges = tuple(_edge_from_dict(e) for e in raw.get("edges", []))
    name = str(raw.get("name") or os.path.splitext(os.path.basename(path))[0])
    logger.debug(f"讀入 {name}：{len(edges)} 個邊軌道")
    return Polyhedron(name, edges, parse_volume(volume))


_GROUP_TERM_RE = re.compile(r"^(?:(?P<mult>\d+)\s*\*\s*)?(?P<name>.+)$")


def resolve_polyhedron(spec: str) -> Polyhedron:
    """JSON 檔案路徑或內建名稱"""
    if spec.endswith(".json") or os.path.isfile(spec):
        return load_polyhedron(spec)
    return archimedean(spec)


def parse_group(text: str) -> list[tuple[int, Polyhedron]]:
    """解析 icosahedron+dodecahedron+2*cube 這類加權多面體清單"""
    group = []
    for piece in text.split("+"):
        m = _GROUP_TERM_RE.match(piece.strip())
        if not m or not m.group("name").strip():
            raise ParseError(f"無法解析多面體清單的項 {piece!r}")
        group.append((int(m.group("mult") or 1), resolve_polyhedron(m.group("name").strip())))
    return group


# ─── 運算 ──────────────────────────────────────────────────────────────

def dehn_invariant(P: Polyhedron) -> DehnVector:
    """Σ count·length·(二面角的基底座標，丟掉 tπ)"""
    total = {}
    for edge in P.edges:
        weight = edge.length * edge.count
        for key, coeff in edge.dihedral.terms:
            total[key] = total.get(key, 0) + weight * coeff
    return DehnVector.build(total)


def table3(yaml_path: str = ARCHIMEDEAN_YAML) -> list[tuple[str, DehnVector]]:
    """所有內建多面體（單位邊長）的 Dehn 不變量，依資料集順序"""
    return [(name, dehn_invariant(archimedean(name, yaml_path))) for name in archimedean_names(yaml_path)]


def _weighted(group) -> tuple:
    vector, volume = DehnVector(), sympy.Integer(0)
    for mult, P in group:
        if not isinstance(mult, int) or mult < 1:
            raise DomainError(f"倍數必須是正整數，收到 {mult!r}")
        vector = vector + dehn_invariant(P).scale(mult)
        volume = None if volume is None or P.volume is None else volume + mult * P.volume
    return vector, volume


def _compare_volumes(left, right) -> str:
    if left is None or right is None:
        return VOLUME_UNKNOWN
    same = (left - right).equals(0)
    if same is None:
        return VOLUME_UNKNOWN
    return VOLUME_EQUAL if same else VOLUME_UNEQUAL


def equidecomposable(left, right) -> Verdict:
    """
    以 Dehn–Sydler 判準判定兩組多面體能否剪拼

    Args:
        left: [(倍數, Polyhedron)]
        right: [(倍數, Polyhedron)]

    Returns:
        Verdict: Dehn 不變量不同或體積不同為 NO；兩者皆同為 YES；體積未知時為 CONDITIONAL
    """
    dl, vl = _weighted(left)
    dr, vr = _weighted(right)
    dehn_equal = (dl - dr).is_zero
    volume_status = _compare_volumes(vl, vr)

    if not dehn_equal or volume_status == VOLUME_UNEQUAL:
        answer = "NO"
    elif volume_status == VOLUME_EQUAL:
        answer = "YES"
    else:
        answer = "CONDITIONAL"
    logger.info(f"📌 剪拼判定：dehn_equal={dehn_equal}, volume={volume_status} → {answer}")
    return Verdict(dl, dr, dehn_equal, volume_status, answer)
