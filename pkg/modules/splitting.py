"""
分裂模組 - 多重二次數的精確算術、正切為多重二次數的角的分裂，以及混合測地角的關係判定
"""
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from sympy import Matrix, Rational

from .arith import RealInterval, factorize, squarefree_part
from .config import FACTOR_LIMIT, MAX_PRECISION_BITS, PRECISION_BITS
from .decomposer import AngleCombo, PureAngle, split_signed, decompose, parse_angle
from .errors import DomainError, ParseError, ResourceLimitError
from .logger import get_logger

logger = get_logger(__name__)


# ===== 多重二次數 =====

@dataclass(frozen=True)
class MultiQuadNumber:
    """Σ c_k·√k，k 為無平方因子正整數（k = 1 為有理部分）"""
    coeffs: tuple = field(default=())

    @classmethod
    def build(cls, mapping) -> "MultiQuadNumber":
        merged = {}
        for k, c in dict(mapping).items():
            if k < 1:
                raise DomainError(f"根號內必須是正整數，收到 {k}")
            s, sf = squarefree_part(k)
            merged[sf] = merged.get(sf, 0) + Fraction(c) * s
        return cls(tuple(sorted((k, c) for k, c in merged.items() if c != 0)))

    @classmethod
    def rational(cls, value) -> "MultiQuadNumber":
        return cls.build({1: Fraction(value)})

    @classmethod
    def sqrt(cls, k: int, coeff=1) -> "MultiQuadNumber":
        return cls.build({k: Fraction(coeff)})

    @property
    def mapping(self) -> dict:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def radicands(self) -> list[int]:
        return [k for k, _ in self.coeffs]

    @property
    def generators(self) -> list[int]:
        """出現在任何 k 中的質數"""
        primes = set()
        for k in self.radicands:
            primes.update(p for p, _ in factorize(k))
        return sorted(primes)

    def single_radicand(self):
        """只含單一 √k 時回傳 (c, k)，0 回傳 (0, 1)，否則 None"""
        if self.is_zero:
            return Fraction(0), 1
        if len(self.coeffs) == 1:
            k, c = self.coeffs[0]
            return c, k
        return None

    def __add__(self, other):
        other = _coerce(other)
        merged = self.mapping
        for k, c in other.coeffs:
            merged[k] = merged.get(k, 0) + c
        return MultiQuadNumber.build(merged)

    __radd__ = __add__

    def __neg__(self):
        return MultiQuadNumber(tuple((k, -c) for k, c in self.coeffs))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        merged = {}
        for k1, c1 in self.coeffs:
            for k2, c2 in other.coeffs:
                g = math.gcd(k1, k2)
                k = k1 // g * (k2 // g)
                merged[k] = merged.get(k, 0) + c1 * c2 * g
        return MultiQuadNumber.build(merged)

    __rmul__ = __mul__

    def conjugate(self, q: int) -> "MultiQuadNumber":
        """√q ↦ −√q 的共軛"""
        return MultiQuadNumber(tuple((k, -c if k % q == 0 else c) for k, c in self.coeffs))

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_zero:
            raise DomainError("多重二次數除以 0")
        num, den = self, other
        for q in other.generators:
            conj = den.conjugate(q)
            num, den = num * conj, den * conj
        rest = den.single_radicand()
        if rest is None or rest[1] != 1:
            raise DomainError(f"有理化失敗：分母仍為 {den}")
        return num * MultiQuadNumber.rational(1 / rest[0])

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def split_on(self, q: int):
        """寫成 z₁ + z₂√q，z₁、z₂ 不含 √q"""
        z1 = {k: c for k, c in self.coeffs if k % q}
        z2 = {k // q: c for k, c in self.coeffs if k % q == 0}
        return MultiQuadNumber.build(z1), MultiQuadNumber.build(z2)

    def evaluate(self, precision: int) -> RealInterval:
        total = RealInterval.exact(0, precision)
        for k, c in self.coeffs:
            term = RealInterval.exact(c, precision) if k == 1 else RealInterval.exact(k, precision).sqrt() * c
            total = total + term
        return total

    def __str__(self):
        if self.is_zero:
            return "0"
        out = ""
        for k, c in self.coeffs:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 1:
                body = f"{mag}"
            elif mag == 1:
                body = f"sqrt({k})"
            else:
                body = f"({mag})sqrt({k})"
            out += (sign if out or sign == "-" else "") + body
        return out


def _coerce(value) -> MultiQuadNumber:
    if isinstance(value, MultiQuadNumber):
        return value
    if isinstance(value, (int, Fraction)):
        return MultiQuadNumber.rational(value)
    raise DomainError(f"無法轉換為多重二次數：{value!r}")


def mq_arith(x: MultiQuadNumber, y: MultiQuadNumber, op: str) -> MultiQuadNumber:
    """
    多重二次數四則運算

    Args:
        op: add、sub、mul、div 之一
    """
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise DomainError(f"未知運算 {op!r}")


def tan_sum(x: MultiQuadNumber, y: MultiQuadNumber) -> MultiQuadNumber:
    """tan(α+β) = (x + y)/(1 − x·y)"""
    return (x + y) / (1 - x * y)


def tan_difference(x: MultiQuadNumber, y: MultiQuadNumber) -> MultiQuadNumber:
    """tan(α−β) = (x − y)/(1 + x·y)"""
    return (x - y) / (1 + x * y)


_MQ_TERM_RE = re.compile(
    r"^(?:\(?(?P<coef>\d+(?:/\d+)?)\)?\s*\*?\s*)?sqrt\s*\(?\s*(?P<k>\d+)\s*\)?$|^(?P<rat>\d+(?:/\d+)?)$"
)


def mq_from_text(text: str) -> MultiQuadNumber:
    """解析 sqrt6+sqrt3+sqrt2+1、(4/5)sqrt(2) - 1/2 這類文字"""
    pieces = split_signed(text.replace(" ", ""))
    if not pieces:
        raise ParseError("空白的多重二次數")
    total = {}
    for sign, piece in pieces:
        m = _MQ_TERM_RE.match(piece)
        if not m:
            raise ParseError(f"無法解析多重二次數的項 {piece!r}")
        if m.group("rat"):
            k, c = 1, Fraction(m.group("rat"))
        else:
            k, c = int(m.group("k")), Fraction(m.group("coef") or 1)
            if k < 1:
                raise ParseError(f"根號內必須是正整數，收到 {piece!r}")
        total[k] = total.get(k, 0) + sign * c
    return MultiQuadNumber.build(total)


# ===== 角的分裂 =====

class SplitResult(NamedTuple):
    """m·α = Σ parts + j·(π/2)"""
    m: int
    parts: list
    j: int


def pure_angle_from_tan(c: Fraction, k: int) -> PureAngle:
    """正切 c·√k 的角，正規化到 [0, π)"""
    tan2 = c * c * k
    if c >= 0:
        return PureAngle(0, tan2 / (1 + tan2))
    return PureAngle(1, 1 / (1 + tan2))


_RIGHT_ANGLE = PureAngle(1, Fraction(0))


def _splitting_prime(t: MultiQuadNumber):
    """把根號集合分成非空兩半的最大質數"""
    for q in reversed(t.generators):
        divisible = [k % q == 0 for k in t.radicands]
        if any(divisible) and not all(divisible):
            return q
    return None


def _split_leaves(t, depth: int, out: list) -> None:
    """t 為 None 代表正切無窮大"""
    if t is None:
        out.append((depth, _RIGHT_ANGLE))
        return
    single = t.single_radicand()
    if single is not None:
        out.append((depth, pure_angle_from_tan(*single)))
        return
    q = _splitting_prime(t)
    if q is None:
        raise DomainError(f"無法分裂 {t}")
    z1, z2 = t.split_on(q)
    z1_sq, qz2_sq = z1 * z1, z2 * z2 * q
    den_gamma = 1 - z1_sq + qz2_sq
    den_delta = 1 + z1_sq - qz2_sq
    gamma = None if den_gamma.is_zero else (2 * z1) / den_gamma
    delta = None if den_delta.is_zero else (2 * z2 * MultiQuadNumber.sqrt(q)) / den_delta
    logger.debug(f"分裂 {t} 於 √{q}：tan γ = {gamma}, tan δ = {delta}")
    _split_leaves(gamma, depth + 1, out)
    _split_leaves(delta, depth + 1, out)


def split_angle(tanval: MultiQuadNumber, precision: int = PRECISION_BITS) -> SplitResult:
    """
    分裂 α = arctan(tanval)：m·α = Σ parts + j·(π/2)

    每一層依最大的可分裂質數 q 寫 tanval = z₁ + z₂√q，
    2α = γ + δ，tan γ = 2z₁/(1 − z₁² + q·z₂²)，tan δ = 2z₂√q/(1 + z₁² − q·z₂²)。

    Returns:
        SplitResult: m = 2^深度；每個 part 的正切落在單一 ℚ√d 中
    """
    leaves = []
    _split_leaves(tanval, 0, leaves)
    depth = max(level for level, _ in leaves)
    parts = []
    for level, angle in leaves:
        parts.extend([angle] * (2 ** (depth - level)))
    m = 2 ** depth

    prec = precision
    while True:
        alpha = tanval.evaluate(prec).atan()
        total = RealInterval.exact(0, prec)
        for part in parts:
            total = total + part.value(prec)
        ratio = (alpha * m - total) / (RealInterval.pi(prec) / 2)
        j = round(ratio.midpoint)
        if ratio.width < Fraction(1, 4) and ratio.contains(j):
            break
        prec *= 2
        if prec > MAX_PRECISION_BITS:
            raise ResourceLimitError(f"分支整數 j 需要超過 {MAX_PRECISION_BITS} bits 的精度")
    logger.info(f"✅ 分裂完成：{m}α = {' + '.join(str(p) for p in parts)} + {j}·π/2")
    return SplitResult(m, parts, j)


# ===== 混合測地角 =====

@dataclass(frozen=True)
class GeodeticSum:
    """Σ coeff·angle，coeff 為有理數"""
    parts: tuple = field(default=())

    @classmethod
    def of(cls, *pairs) -> "GeodeticSum":
        return cls(tuple((Fraction(c), parse_angle(a)) for c, a in pairs))

    def __str__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"{c}*{a}" for c, a in self.parts)


_SUM_TERM_RE = re.compile(r"^(?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?(?P<angle>.+)$")


def parse_sum(text: str) -> GeodeticSum:
    """解析 1*ang(8/9) + 2*ang(1+2/3)"""
    pairs = []
    for sign, piece in split_signed(text.strip(), keep_offsets=True):
        m = _SUM_TERM_RE.match(piece)
        if not m:
            raise ParseError(f"無法解析角度和的項 {piece!r}")
        pairs.append((sign * Fraction(m.group("coef") or 1), parse_angle(m.group("angle").strip())))
    return GeodeticSum(tuple(pairs))


def decompose_mixed(s: GeodeticSum, precision: int = PRECISION_BITS, factor_limit: int = FACTOR_LIMIT) -> AngleCombo:
    """Σ coeff·decompose(angle)，同一基底角的係數合併"""
    total = AngleCombo()
    for coeff, angle in s.parts:
        total = total + decompose(angle, precision, factor_limit).scale(coeff)
    return total


def is_rational_multiple_of_pi(s: GeodeticSum, precision: int = PRECISION_BITS):
    """混合角為 tπ 時回傳 t，否則回傳 None"""
    combo = decompose_mixed(s, precision)
    return combo.t if combo.is_pure_pi else None


class Relation(NamedTuple):
    """Σ coefficients[i]·angles[i] = pi_multiple·π"""
    coefficients: tuple
    pi_multiple: Fraction


def _sympy_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def _primitive_integer(vector) -> tuple:
    fracs = [Fraction(int(v.p), int(v.q)) for v in vector]
    lcm = math.lcm(*(f.denominator for f in fracs))
    ints = [int(f * lcm) for f in fracs]
    g = math.gcd(*ints)
    ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    if first < 0:
        ints = [-v for v in ints]
    return tuple(Fraction(v) for v in ints)


def find_relations(angles: list, precision: int = PRECISION_BITS, factor_limit: int = FACTOR_LIMIT) -> list[Relation]:
    """
    找出所有使 Σ cᵢ·angleᵢ 為 π 的有理倍數的係數向量（零空間的一組基底）

    Args:
        angles: GeodeticSum 或可解析的角度描述

    Returns:
        list: Relation，每個係數向量化為首項為正的本原整數向量
    """
    sums = [a if isinstance(a, GeodeticSum) else GeodeticSum.of((1, a)) for a in angles]
    combos = [decompose_mixed(s, precision, factor_limit) for s in sums]
    if not combos:
        return []
    keys = sorted({k for c in combos for k in c.keys}, key=lambda k: k.sort_key)

    if keys:
        matrix = Matrix([[_sympy_rational(c.term_map.get(k, Fraction(0))) for c in combos] for k in keys])
        basis = matrix.nullspace()
    else:
        basis = [Matrix([1 if i == j else 0 for i in range(len(combos))]) for j in range(len(combos))]

    relations = []
    for vector in basis:
        coeffs = _primitive_integer(vector)
        pi_multiple = sum((c * combo.t for c, combo in zip(coeffs, combos)), Fraction(0))
        relations.append(Relation(coeffs, pi_multiple))
    logger.info(f"✅ {len(combos)} 個角找到 {len(relations)} 個有理關係")
    return relations
