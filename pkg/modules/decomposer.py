"""
分解模組 - 將純測地角寫成 tπ 加上基底角 ⟨p⟩_d 的整數線性組合

流程：求出正切 (b/a)√d，分解 a + b√−d 生成的主理想，
依共軛判定決定每個基底角的正負號，再以區間算術找出 t 並做精確驗證。
"""
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import RealInterval, require_squarefree, squarefree_part
from .basis_angles import BasisAngle, BasisKey, basis_angle, evaluate, format_degrees, require_basis_angle
from .class_group import class_group
from .config import FACTOR_LIMIT, MAX_PRECISION_BITS, PRECISION_BITS
from .errors import DomainError, InconsistencyError, ParseError, ResourceLimitError
from .logger import get_logger
from .quad_ideals import SPLIT, QuadInt, factor_principal

logger = get_logger(__name__)


# ===== 型別 =====

@dataclass(frozen=True)
class PureAngle:
    """純測地角 n·(π/2) + arcsin√r，0 ≤ r < 1（r = 1 會進位成 n+1）"""
    n: int
    r: Fraction

    def __post_init__(self):
        r = Fraction(self.r)
        if not 0 <= r <= 1:
            raise DomainError(f"r 必須落在 [0, 1]，收到 {r}")
        if r == 1:
            object.__setattr__(self, "n", self.n + 1)
            r = Fraction(0)
        object.__setattr__(self, "r", r)

    def value(self, precision: int) -> RealInterval:
        """角度的區間值（弧度）"""
        quarter = RealInterval.pi(precision) * Fraction(self.n, 2)
        if self.r == 0:
            return quarter
        phi = (RealInterval.exact(self.r / (1 - self.r), precision)).sqrt().atan()
        return quarter + phi

    @property
    def degrees(self) -> str:
        return format_degrees(self.value(64))

    def __str__(self):
        if self.r == 0:
            return f"ang({self.n})"
        if self.n == 0:
            return f"ang({self.r})"
        return f"ang({self.n}+{self.r})"


@dataclass(frozen=True)
class SurdTan:
    """tan(θ mod π) = ±(b/a)√d；a = 0 時為無窮大"""
    a: int
    b: int
    d: int
    negated: bool = False
    infinite: bool = False

    def __str__(self):
        if self.infinite:
            return "inf"
        sign = "-" if self.negated else ""
        return f"{sign}({self.b}/{self.a})sqrt({self.d})"


@dataclass(frozen=True)
class AngleCombo:
    """
    基底座標：t·π + Σ coeff·⟨p⟩_d

    terms 以 (d, p) 排序儲存，不含係數 0。
    """
    t: Fraction = Fraction(0)
    terms: tuple = field(default=())

    @classmethod
    def build(cls, t, terms) -> "AngleCombo":
        """由 t 與 {BasisKey: 係數} 建立（自動去除 0 並排序）"""
        cleaned = {k: Fraction(v) for k, v in dict(terms).items() if v != 0}
        ordered = tuple(sorted(cleaned.items(), key=lambda kv: kv[0].sort_key))
        return cls(Fraction(t), ordered)

    @property
    def term_map(self) -> dict:
        return dict(self.terms)

    @property
    def keys(self) -> list:
        return [k for k, _ in self.terms]

    @property
    def is_pure_pi(self) -> bool:
        return not self.terms

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.terms)

    def __add__(self, other):
        merged = self.term_map
        for k, c in other.terms:
            merged[k] = merged.get(k, 0) + c
        return AngleCombo.build(self.t + other.t, merged)

    def __neg__(self):
        return AngleCombo.build(-self.t, {k: -c for k, c in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "AngleCombo":
        factor = Fraction(factor)
        return AngleCombo.build(self.t * factor, {k: c * factor for k, c in self.terms})

    def residue(self) -> Fraction:
        """t 化約到 (−1/2, 1/2]（以 π 為模的代表元）"""
        return self.t - math.ceil(self.t - Fraction(1, 2))

    def to_text(self) -> str:
        """序列化成 t=P/Q; <p>_d^k; ..."""
        parts = [f"t={self.t}"]
        parts += [f"<{k.p}>_{k.d}^{c}" for k, c in self.terms]
        return "; ".join(parts)

    def to_dict(self) -> dict:
        return {
            "t": str(self.t),
            "terms": [{"p": k.p, "d": k.d, "coeff": str(c)} for k, c in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AngleCombo":
        try:
            terms = {BasisKey(int(x["p"]), int(x["d"])): Fraction(x["coeff"]) for x in data.get("terms", [])}
            return cls.build(Fraction(data["t"]), terms)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"無法解析組合 JSON：{e}") from e

    def __str__(self):
        return self.to_text()


# ===== 解析 =====

_RAT = r"[+-]?\d+(?:/\d+)?"
_OFFSET_RE = re.compile(r"^(?P<body>.*?)(?:\s*(?P<sign>[+-])\s*(?:(?P<n>\d+)\s*\*\s*)?pi\s*/\s*2)?\s*$")
_ANG_RE = re.compile(r"^ang\(\s*(?:(?P<n>[+-]?\d+)\s*\+\s*)?(?P<r>[+-]?\d+(?:/\d+)?)\s*\)$")
_FUNC_RE = re.compile(r"^(?P<func>sin2|cos2|tan2|cot2|sec2|csc2)\s*=\s*(?P<value>\S+)$")
_TAN_RE = re.compile(r"^tan\s*=\s*\(\s*(?P<b>\d+)\s*/\s*(?P<a>\d+)\s*\)\s*sqrt\s*\(?\s*(?P<d>\d+)\s*\)?$")


def _rational(text: str, what: str) -> Fraction:
    if not re.fullmatch(_RAT, text.strip()):
        raise ParseError(f"{what} 必須是有理數 P/Q，收到 {text.strip()!r}")
    return Fraction(text.strip())


def _sin2_from(func: str, value: Fraction) -> Fraction:
    """將六個平方三角函數之一換算為 sin²"""
    if value < 0:
        raise DomainError(f"{func} 不可為負，收到 {value}")
    if func == "sin2":
        return value
    if func == "cos2":
        return 1 - value
    if func == "tan2":
        return value / (1 + value)
    if func == "cot2":
        return 1 / (1 + value)
    if func == "sec2":
        if value < 1:
            raise DomainError(f"sec2 必須 ≥ 1，收到 {value}")
        return 1 - 1 / value
    if func == "csc2":
        if value < 1:
            raise DomainError(f"csc2 必須 ≥ 1，收到 {value}")
        return 1 / value
    raise ParseError(f"未知的三角函數 {func!r}")


def _from_tan(b: int, a: int, d: int) -> Fraction:
    require_squarefree(d)
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise DomainError(f"tan=(b/a)sqrt(d) 需要非負的 a, b 且不同時為 0，收到 ({b}/{a})")
    return Fraction(d * b * b, a * a + d * b * b)


def _from_quarter_turns(value: Fraction, offset: int) -> PureAngle:
    """∠x，x > 1 時拆成整數部分 n 與小數部分 r"""
    if value < 0:
        raise DomainError(f"∠ 的參數不可為負，收到 {value}")
    whole = math.floor(value) if value > 1 else 0
    return PureAngle(whole + offset, value - whole)


def _parse_text(text: str) -> PureAngle:
    match = _OFFSET_RE.match(text.strip())
    body = match.group("body").strip()
    offset = 0
    if match.group("sign"):
        offset = int(match.group("n") or 1)
        if match.group("sign") == "-":
            offset = -offset

    m = _ANG_RE.match(body)
    if m:
        if m.group("n") is None:
            return _from_quarter_turns(Fraction(m.group("r")), offset)
        return PureAngle(int(m.group("n")) + offset, Fraction(m.group("r")))

    m = _FUNC_RE.match(body)
    if m:
        value = _rational(m.group("value"), m.group("func"))
        return PureAngle(offset, _sin2_from(m.group("func"), value))

    m = _TAN_RE.match(body)
    if m:
        return PureAngle(offset, _from_tan(int(m.group("b")), int(m.group("a")), int(m.group("d"))))

    token = body.split("=")[0].split("(")[0] or body
    raise ParseError(f"無法解析角度 {text!r}（出錯片段：{token!r}）")


def parse_angle(spec) -> PureAngle:
    """
    解析角度描述

    Args:
        spec: 文字（ang(N+P/Q)、sin2=P/Q、cos2=...、tan2=...、tan=(B/A)sqrt(D)，
              可加 + N*pi/2）或字典（{"sin2": r, "n": 1}、{"tan": (b, a, d)} 等）

    Returns:
        PureAngle
    """
    if isinstance(spec, PureAngle):
        return spec
    if isinstance(spec, str):
        return _parse_text(spec)
    if not isinstance(spec, dict):
        raise ParseError(f"角度描述必須是文字或字典，收到 {type(spec).__name__}")

    offset = int(spec.get("n", 0))
    if "ang" in spec:
        value = spec["ang"]
        if isinstance(value, str):
            angle = _parse_text(f"ang({value})")
            return PureAngle(angle.n + offset, angle.r)
        return _from_quarter_turns(Fraction(value), offset)
    if "tan" in spec:
        b, a, d = spec["tan"]
        return PureAngle(offset, _from_tan(int(b), int(a), int(d)))
    for func in ("sin2", "cos2", "tan2", "cot2", "sec2", "csc2"):
        if func in spec:
            try:
                value = Fraction(spec[func])
            except (TypeError, ValueError) as e:
                raise ParseError(f"{func} 必須是有理數，收到 {spec[func]!r}") from e
            return PureAngle(offset, _sin2_from(func, value))
    raise ParseError(f"無法辨識的角度欄位：{sorted(spec)}")


_TERM_RE = re.compile(
    r"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?"
    r"(?:(?P<pi>pi)(?:\s*/\s*(?P<pi_den>\d+))?|<(?P<p>\d+)>_(?P<d>\d+)|(?P<zero>0))$"
)


_OFFSET_TAIL_RE = re.compile(r"[+-]\s*(?:\d+\s*\*\s*)?pi\s*/\s*2\s*(?=[+-]|$)")


def split_signed(text: str, keep_offsets: bool = False) -> list[tuple[int, str]]:
    """
    在最外層的 + / − 切開，回傳 (正負號, 片段)

    Args:
        text: 要切開的運算式
        keep_offsets: True 時 ± N*pi/2 留在前一個片段裡（角度描述的偏移寫法）
    """
    pieces, depth, current, sign = [], 0, "", 1
    for i, ch in enumerate(text):
        if ch in "(<":
            depth += 1
        elif ch in ")>":
            depth -= 1
        if ch in "+-" and depth == 0 and not current.rstrip().endswith(("=", "*", "/", "^")):
            if keep_offsets and current.strip() and _OFFSET_TAIL_RE.match(text, i):
                current += ch
                continue
            if current.strip():
                pieces.append((sign, current.strip()))
            elif ch == "-":
                sign = -sign
                continue
            current, sign = "", (1 if ch == "+" else -1)
            continue
        current += ch
    if current.strip():
        pieces.append((sign, current.strip()))
    return pieces


def parse_combo(text: str) -> AngleCombo:
    """
    解析組合文字：序列化格式 t=1; <3>_2^-2
    或運算式格式 pi - 2*<3>_2、3*pi/4 - <3>_5 + 1/2*<5>_1
    """
    text = text.strip()
    if not text:
        raise ParseError("空白的組合描述")

    if text.startswith("t="):
        chunks = [c.strip() for c in text.split(";") if c.strip()]
        t = _rational(chunks[0][2:], "t")
        terms = {}
        for chunk in chunks[1:]:
            m = re.fullmatch(r"<(\d+)>_(\d+)\^(" + _RAT + r")", chunk)
            if not m:
                raise ParseError(f"無法解析組合項 {chunk!r}")
            key = require_basis_angle(int(m.group(1)), int(m.group(2))).key
            terms[key] = terms.get(key, 0) + Fraction(m.group(3))
        return AngleCombo.build(t, terms)

    t, terms = Fraction(0), {}
    for sign, piece in split_signed(text):
        m = _TERM_RE.match(piece.replace(" ", ""))
        if not m:
            raise ParseError(f"無法解析組合項 {piece!r}")
        coef = sign * Fraction(m.group("coef") or 1)
        if m.group("zero"):
            continue
        if m.group("pi"):
            t += coef / int(m.group("pi_den") or 1)
        else:
            key = require_basis_angle(int(m.group("p")), int(m.group("d"))).key
            terms[key] = terms.get(key, 0) + coef
    return AngleCombo.build(t, terms)


# ===== 正切與平方三角函數 =====

def squared_trig(theta: PureAngle) -> dict:
    """六個平方三角函數的精確值（無窮大以 None 表示）"""
    sin2 = theta.r if theta.n % 2 == 0 else 1 - theta.r
    cos2 = 1 - sin2

    def ratio(num, den):
        return None if den == 0 else num / den

    return {
        "sin2": sin2,
        "cos2": cos2,
        "tan2": ratio(sin2, cos2),
        "cot2": ratio(cos2, sin2),
        "sec2": ratio(Fraction(1), cos2),
        "csc2": ratio(Fraction(1), sin2),
    }


def tan_surd(theta: PureAngle) -> SurdTan:
    """
    θ 的正切寫成 ±(b/a)√d

    Args:
        theta: 純測地角

    Returns:
        SurdTan: θ ≡ π/2 (mod π) 時 infinite 為 True
    """
    r = theta.r
    odd = theta.n % 2 == 1
    if r == 0:
        if odd:
            return SurdTan(0, 1, 1, infinite=True)
        return SurdTan(1, 0, 1)

    num, den = r.numerator, r.denominator
    rest = den - num
    s, d = squarefree_part(num * rest)
    a, b = rest, s
    g = math.gcd(a, b)
    a, b = a // g, b // g
    if not odd:
        return SurdTan(a, b, d)

    # tan(θ) = −cot φ = −a/(b√d) = −(a√d)/(b·d)
    a2, b2 = b * d, a
    g = math.gcd(a2, b2)
    return SurdTan(a2 // g, b2 // g, d, negated=True)


# ===== 分解 =====

def _generator_element(tan: SurdTan) -> QuadInt:
    """argument ≡ θ (mod π) 的元素 a ± b√−d"""
    sign = -1 if tan.negated else 1
    return QuadInt(2 * tan.a, 2 * sign * tan.b, tan.d)


def _coefficients(tan: SurdTan, factor_limit: int = FACTOR_LIMIT) -> dict:
    terms = {}
    alpha = _generator_element(tan)
    for ideal, e in factor_principal(alpha.x, alpha.y, tan.d, factor_limit):
        if ideal.kind != SPLIT:
            continue
        basis = require_basis_angle(ideal.p, tan.d)
        sign = 1 if ideal == basis.ideal else -1
        terms[basis.key] = terms.get(basis.key, 0) + sign * e
    return terms


def combo_eval(c: AngleCombo, precision: int = PRECISION_BITS) -> RealInterval:
    """t·π + Σ coeff·⟨p⟩_d 的區間值"""
    total = RealInterval.pi(precision) * c.t
    for key, coeff in c.terms:
        total = total + evaluate(require_basis_angle(key.p, key.d), precision) * coeff
    return total


def _recognize_t(theta: PureAngle, terms: dict, bound: int, precision: int) -> Fraction:
    """由 (θ − Σ)/π 的區間找出分母 ≤ bound 的唯一有理數"""
    partial = AngleCombo.build(0, terms)
    separation = Fraction(1, 2 * bound * bound)
    prec = precision
    while True:
        residual = (theta.value(prec) - combo_eval(partial, prec)) / RealInterval.pi(prec)
        if residual.width < separation:
            candidate = residual.midpoint.limit_denominator(bound)
            if residual.contains(candidate):
                return candidate
            raise InconsistencyError(f"{theta} 的殘差 {residual} 不含分母 ≤ {bound} 的有理數")
        prec *= 2
        if prec > MAX_PRECISION_BITS:
            raise ResourceLimitError(f"辨識 t 需要超過 {MAX_PRECISION_BITS} bits 的精度")
        logger.debug(f"t 辨識精度提升到 {prec} bits")


def decompose(theta: PureAngle, precision: int = PRECISION_BITS, factor_limit: int = FACTOR_LIMIT) -> AngleCombo:
    """
    將純測地角分解為 tπ ± ⟨p₁⟩_d ± ⟨p₂⟩_d ± ⋯

    Args:
        theta: 純測地角
        precision: t 辨識的起始精度
        factor_limit: 範數分解允許的最大合成數餘因子

    Returns:
        AngleCombo: 整數係數的精確座標（已通過精確驗證）
    """
    theta = parse_angle(theta)
    tan = tan_surd(theta)
    if tan.infinite or tan.b == 0:
        return AngleCombo.build(Fraction(theta.n, 2), {})

    terms = _coefficients(tan, factor_limit)
    bound = 12 * class_group(tan.d).c_d
    t = _recognize_t(theta, terms, bound, precision)
    combo = AngleCombo.build(t, terms)
    if not combo_verify_exact(theta, combo):
        raise InconsistencyError(f"{theta} 的分解 {combo} 未通過精確驗證")
    logger.debug(f"{theta} = {combo}")
    return combo


def combo_verify_exact(theta: PureAngle, c: AngleCombo) -> bool:
    """
    以 O_d 中的精確乘法驗證 θ = tπ + Σ coeff·⟨p⟩_d

    乘上 N（t 與各 s 的公倍數）後，α^N·Π(生成元共軛)^(N·coeff/s)
    必須是實數，且正負號符合 N·t − N·m 的奇偶（θ = arg α + mπ）。
    """
    theta = parse_angle(theta)
    if not c.is_integral:
        return False
    tan = tan_surd(theta)
    if tan.infinite or tan.b == 0:
        return c.is_pure_pi and c.t == Fraction(theta.n, 2)

    if any(key.d != tan.d for key in c.keys):
        return False
    bases = {}
    for key in c.keys:
        basis = basis_angle(key.p, key.d)
        if not isinstance(basis, BasisAngle):
            return False
        bases[key] = basis

    n_mult = math.lcm(c.t.denominator, 2, *(b.s for b in bases.values()))
    element = _generator_element(tan) ** n_mult
    for key, coeff in c.terms:
        basis = bases[key]
        generator = QuadInt(basis.a, basis.b, tan.d)
        k = n_mult * int(coeff) // basis.s
        if k > 0:
            element = element * generator.conjugate() ** k
        elif k < 0:
            element = element * generator ** (-k)

    if element.y != 0 or element.x == 0:
        return False
    m = (theta.n + 1) // 2
    turns = n_mult * c.t - n_mult * m
    if turns.denominator != 1:
        return False
    expected = 1 if int(turns) % 2 == 0 else -1
    if (1 if element.x > 0 else -1) != expected:
        return False

    # 精確條件只確定到 2π/N 的倍數，數值再排除其餘可能
    diff = theta.value(64) - combo_eval(c, 64)
    limit = RealInterval.pi(64) / n_mult
    return (limit - diff).sign() > 0 and (limit + diff).sign() > 0
