"""
二次整數環理想模組 - 質數分裂、質理想冪次的生成元、主理想分解

元素 (x + y√−d)/2 以 QuadInt(x, y, d) 表示；
質理想 (p, u + √−d) 以 PrimeIdeal(p, u, kind, d) 表示。
"""
import math
from dataclasses import dataclass

from .arith import factorize, require_prime, require_squarefree, sqrt_mod
from .class_group import (
    QuadForm,
    class_group,
    discriminant_of,
    form_order,
    principal_form,
    reduce,
    reduce_with_transform,
)
from .config import FACTOR_LIMIT
from .errors import DomainError, InconsistencyError
from .logger import get_logger

logger = get_logger(__name__)

SPLIT = "split"
RAMIFIED = "ramified"
INERT = "inert"


@dataclass(frozen=True)
class QuadInt:
    """O_d 中的元素 (x + y√−d)/2"""
    x: int
    y: int
    d: int

    def __post_init__(self):
        if self.d % 4 == 3:
            if (self.x - self.y) % 2:
                raise DomainError(f"d={self.d} 時 x, y 需同奇偶，收到 ({self.x}, {self.y})")
        elif self.x % 2 or self.y % 2:
            raise DomainError(f"d={self.d} 時 x, y 需皆為偶數，收到 ({self.x}, {self.y})")

    @classmethod
    def one(cls, d: int):
        return cls(2, 0, d)

    @property
    def norm(self) -> int:
        return (self.x * self.x + self.d * self.y * self.y) // 4

    @property
    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def conjugate(self):
        return QuadInt(self.x, -self.y, self.d)

    def __neg__(self):
        return QuadInt(-self.x, -self.y, self.d)

    def __mul__(self, other):
        if other.d != self.d:
            raise DomainError(f"不同環的元素不能相乘：d={self.d} 與 d={other.d}")
        x = (self.x * other.x - self.d * self.y * other.y) // 2
        y = (self.x * other.y + other.x * self.y) // 2
        return QuadInt(x, y, self.d)

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("QuadInt 只支援非負整數次方")
        result, base = QuadInt.one(self.d), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def content(self) -> int:
        """最大的有理整數 g 使 self/g 仍屬於 O_d"""
        g = math.gcd(self.x, self.y)
        if g == 0:
            return 0
        if (self.x // g - self.y // g) % 2:
            return g // 2
        if self.d % 4 != 3 and (self.x // g) % 2:
            return g // 2
        return g

    def divide_rational(self, g: int):
        """除以整除它的有理整數 g"""
        return QuadInt(self.x // g, self.y // g, self.d)


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    """
    質理想 (p, u + √−d)

    p = 2 且 d ≡ 7 (mod 8) 時表示 (2, (u + √−d)/2)，u ∈ {1, 3}。
    kind 為 inert 時代表 (p) 本身，u 固定為 0。
    """
    p: int
    u: int
    kind: str
    d: int

    def contains(self, z: QuadInt) -> bool:
        """z 是否屬於此理想（一行同餘判定）"""
        if z.d != self.d:
            raise DomainError(f"元素與理想不在同一個環：d={z.d} 與 d={self.d}")
        p, u = self.p, self.u
        if self.kind == INERT:
            return z.content() % p == 0
        if p == 2:
            if self.d % 4 == 3:
                return (z.x - u * z.y) % 4 == 0
            return (z.x // 2 - u * (z.y // 2)) % 2 == 0
        return (z.x - u * z.y) % p == 0

    @property
    def norm(self) -> int:
        return self.p * self.p if self.kind == INERT else self.p

    def __str__(self):
        if self.kind == INERT:
            return f"({self.p})"
        if self.p == 2 and self.d % 4 == 3:
            return f"(2, ({self.u}+√−{self.d})/2)"
        return f"({self.p}, {self.u}+√−{self.d})"


@dataclass(frozen=True)
class Inert:
    p: int
    d: int
    kind: str = INERT


@dataclass(frozen=True)
class Ramified:
    ideal: PrimeIdeal
    kind: str = RAMIFIED


@dataclass(frozen=True)
class Split:
    """共軛質理想對，first 的 u 較小"""
    first: PrimeIdeal
    second: PrimeIdeal
    kind: str = SPLIT

    @property
    def ideals(self):
        return (self.first, self.second)


def split_type(p: int, d: int):
    """
    質數 p 在 O_d 中的分解型態

    Returns:
        Inert | Ramified | Split
    """
    require_prime(p)
    require_squarefree(d)
    if p == 2:
        if d % 4 != 3:
            return Ramified(PrimeIdeal(2, d % 2, RAMIFIED, d))
        if d % 8 == 3:
            return Inert(2, d)
        return Split(PrimeIdeal(2, 1, SPLIT, d), PrimeIdeal(2, 3, SPLIT, d))
    if d % p == 0:
        return Ramified(PrimeIdeal(p, 0, RAMIFIED, d))
    u = sqrt_mod(-d, p)
    if u is None:
        return Inert(p, d)
    return Split(PrimeIdeal(p, u, SPLIT, d), PrimeIdeal(p, p - u, SPLIT, d))


def conjugate(P: PrimeIdeal) -> PrimeIdeal:
    """共軛理想：u ↦ p − u；p = 2 時 1 ↔ 3；分歧與惰性理想回傳自身"""
    if P.kind != SPLIT:
        return P
    if P.p == 2:
        return PrimeIdeal(2, 4 - P.u, SPLIT, P.d)
    return PrimeIdeal(P.p, P.p - P.u, SPLIT, P.d)


def ideal_form(P: PrimeIdeal) -> QuadForm:
    """
    質理想對應的二次型 (p, B, C)，其中 P = [p, (B + √D)/2]

    Args:
        P: 分裂或分歧質理想

    Returns:
        QuadForm: 未約化的型
    """
    if P.kind == INERT:
        raise DomainError(f"惰性理想 {P} 是主理想，沒有對應的質理想型")
    p, u, d = P.p, P.u, P.d
    D = discriminant_of(d)
    if D % 4 == 0:
        b = 2 * u
    elif p == 2:
        b = u
    else:
        b = p if u == 0 else (u if u % 2 else u + p)
    return QuadForm(p, b, (b * b - D) // (4 * p))


def is_principal(P: PrimeIdeal) -> bool:
    """P 是否為主理想"""
    if P.kind == INERT:
        return True
    return reduce(ideal_form(P)) == principal_form(discriminant_of(P.d))


def ideal_order(P: PrimeIdeal) -> int:
    """P 的理想類在類群中的階"""
    if P.kind == INERT:
        return 1
    G = class_group(P.d)
    return form_order(reduce(ideal_form(P)), G)


def _lift_root(P: PrimeIdeal, D: int, s: int) -> int:
    """找 B_s ≡ B (mod 2p) 使 B_s² ≡ D (mod 4pˢ)"""
    p = P.p
    b = ideal_form(P).B
    if p == 2:
        r = b
        for k in range(3, s + 2):
            if (r * r - D) % (1 << (k + 1)):
                r += 1 << (k - 1)
        return r
    r, mod = b % p, p
    for _ in range(1, s):
        mod *= p
        r = (r - (r * r - D) * pow(2 * r, -1, mod)) % mod
    if (r - D) % 2:
        r += mod
    return r


def _normalize_units(z: QuadInt) -> QuadInt:
    """依單位元慣例選出唯一的生成元：x > 0；d=1 要求 4 | y；d=3 要求 2 | y"""
    if z.d == 1:
        candidates = [z]
        for _ in range(3):
            z = QuadInt(-z.y, z.x, 1)
            candidates.append(z)
        return next(c for c in candidates if c.y % 4 == 0 and c.x > 0)
    if z.d == 3:
        candidates = [z]
        for _ in range(5):
            z = QuadInt((z.x - 3 * z.y) // 2, (z.x + z.y) // 2, 3)
            candidates.append(z)
        return next(c for c in candidates if c.y % 2 == 0 and c.x > 0)
    return z if z.x > 0 else -z


def prime_power_generator(P: PrimeIdeal, d: int, s: int) -> QuadInt:
    """
    Pˢ 的生成元（Pˢ 必須是主理想）

    以格基約化求出範數 pˢ 的元素，再用單位元慣例正規化。
    回傳值的 x > 0；y > 0 當且僅當 P 是共軛對中的標準理想。

    Args:
        P: 分裂質理想
        d: 與 P.d 相同
        s: P 的理想類的階

    Returns:
        QuadInt: Pˢ 的生成元
    """
    if P.kind != SPLIT:
        raise DomainError(f"只有分裂質理想有標準生成元，收到 {P}")
    if P.d != d:
        raise DomainError(f"理想 {P} 不在 O_{d} 中")
    if s < 1:
        raise DomainError(f"s 必須 ≥ 1，收到 {s}")

    D = discriminant_of(d)
    ps = P.p ** s
    b = _lift_root(P, D, s)
    f = QuadForm(ps, b, (b * b - D) // (4 * ps))
    g, m = reduce_with_transform(f)
    if g != principal_form(D):
        raise DomainError(f"{P} 的 {s} 次方不是主理想")

    mm, nn = m[0][0], m[1][0]
    scale = 2 if D % 4 == 0 else 1
    z = QuadInt(2 * ps * mm + nn * b, nn * scale, d)
    if z.norm != ps:
        raise InconsistencyError(f"格基約化得到的元素範數 {z.norm} ≠ {ps}")
    if not P.contains(z):
        z = z.conjugate()
    z = _normalize_units(z)
    if not P.contains(z):
        raise InconsistencyError(f"生成元 {z} 不屬於 {P}")
    logger.debug(f"生成元 {P}^{s} = ({z.x} + {z.y}√−{d})/2")
    return z


def factor_principal(x: int, y: int, d: int, factor_limit: int = FACTOR_LIMIT) -> list[tuple[PrimeIdeal, int]]:
    """
    將主理想 ((x + y√−d)/2) 分解為質理想的乘積

    有理整數部分 g 依 q 的分解型態展開；本原部分的每個質數 q
    以同餘判定選出包含此元素的共軛理想。

    Returns:
        list: 依 (p, u) 排序的 (PrimeIdeal, 指數)
    """
    require_squarefree(d)
    z = QuadInt(x, y, d)
    if z.is_zero:
        raise DomainError("0 沒有質理想分解")

    exponents: dict = {}

    def add(P, e):
        exponents[P] = exponents.get(P, 0) + e

    g = z.content()
    for q, e in factorize(g, factor_limit):
        st = split_type(q, d)
        if st.kind == SPLIT:
            add(st.first, e)
            add(st.second, e)
        elif st.kind == RAMIFIED:
            add(st.ideal, 2 * e)
        else:
            add(PrimeIdeal(q, 0, INERT, d), e)

    beta = z.divide_rational(g)
    for q, v in factorize(beta.norm, factor_limit):
        st = split_type(q, d)
        if st.kind == INERT:
            raise InconsistencyError(f"惰性質數 {q} 整除本原元素 ({beta.x} + {beta.y}√−{d})/2 的範數")
        if st.kind == RAMIFIED:
            add(st.ideal, v)
            continue
        inside = [P for P in st.ideals if P.contains(beta)]
        if len(inside) != 1:
            raise InconsistencyError(f"質數 {q} 上的共軛理想判定失敗：{[str(P) for P in inside]}")
        add(inside[0], v)

    return sorted(exponents.items(), key=lambda item: (item[0].p, item[0].u))
