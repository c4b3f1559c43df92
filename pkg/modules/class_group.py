"""
類群模組 - 以約化二元二次型計算 O_d 的理想類群
"""
import math
import threading
from dataclasses import dataclass
from functools import cached_property

from .arith import ext_gcd, is_squarefree, primes_up_to
from .errors import DomainError
from .logger import get_logger

logger = get_logger(__name__)

IDENTITY = ((1, 0), (0, 1))


@dataclass(frozen=True)
class QuadForm:
    """正定二元二次型 A·x² + B·xy + C·y²"""
    A: int
    B: int
    C: int

    @property
    def D(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    @property
    def is_primitive(self) -> bool:
        return math.gcd(self.A, self.B, self.C) == 1

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.A, self.B, self.C
        if not (abs(b) <= a <= c):
            return False
        if b < 0 and (a == c or -b == a):
            return False
        return True

    def value(self, x: int, y: int) -> int:
        return self.A * x * x + self.B * x * y + self.C * y * y

    def inverse(self):
        """反元素（約化後）"""
        return reduce(QuadForm(self.A, -self.B, self.C))

    def __str__(self):
        return f"({self.A}, {self.B}, {self.C})"


def _mat_mul(m, n):
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def discriminant_of(d: int) -> int:
    """
    O_d 的判別式

    Args:
        d: 正的無平方因子整數

    Returns:
        int: d ≡ 3 (mod 4) 時為 −d，否則為 −4d
    """
    if not isinstance(d, int) or d < 1 or not is_squarefree(d):
        raise DomainError(f"d 必須是正的無平方因子整數，收到 {d}")
    return -d if d % 4 == 3 else -4 * d


def principal_form(D: int) -> QuadForm:
    """判別式 D 的單位型"""
    if D % 4 == 0:
        return QuadForm(1, 0, -D // 4)
    return QuadForm(1, 1, (1 - D) // 4)


def reduce_with_transform(f: QuadForm):
    """
    約化正定二次型並記錄么模變換

    Returns:
        tuple: (約化型 g, 矩陣 M)，滿足 g(x, y) = f(M·(x, y))
    """
    a, b, c = f.A, f.B, f.C
    if a <= 0 or f.D >= 0:
        raise DomainError(f"只能約化正定二次型，收到 {f}")
    if not f.is_primitive:
        raise DomainError(f"二次型 {f} 不是本原型")

    m = IDENTITY
    while True:
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
            m = _mat_mul(m, ((1, k), (0, 1)))
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            m = _mat_mul(m, ((0, -1), (1, 0)))
            continue
        break
    return QuadForm(a, b, c), m


def reduce(f: QuadForm) -> QuadForm:
    """回傳與 f 等價的唯一約化型"""
    return reduce_with_transform(f)[0]


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """
    Dirichlet 合成（結果已約化）

    設 s = (B₁+B₂)/2，e = gcd(A₁, A₂, s) = u·A₁ + v·A₂ + w·s，
    則 A₃ = A₁A₂/e²，B₃ = B₂ + 2(A₂/e)(v(s − B₂) − w·C₂)。
    """
    D = f.D
    if g.D != D:
        raise DomainError(f"判別式不同，無法合成：{f} 與 {g}")

    a1, b1 = f.A, f.B
    a2, b2, c2 = g.A, g.B, g.C
    s = (b1 + b2) // 2
    g1, x1, y1 = ext_gcd(a1, a2)
    e, x2, w = ext_gcd(g1, s)
    v = x2 * y1

    a3 = a1 * a2 // (e * e)
    b3 = b2 + 2 * (a2 // e) * (v * (s - b2) - w * c2)
    b3 %= 2 * a3
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce(QuadForm(a3, b3, c3))


def power(f: QuadForm, n: int) -> QuadForm:
    """f 的 n 次方（n 可為負）"""
    result = principal_form(f.D)
    base = reduce(f) if n >= 0 else f.inverse()
    n = abs(n)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def reduced_forms(D: int) -> list[QuadForm]:
    """
    直接列舉判別式 D 的所有本原約化型

    A ≤ √(|D|/3)，−A < B ≤ A，B ≡ D (mod 2)，C ≥ A。
    """
    forms = []
    a_max = math.isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if math.gcd(a, b, c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
    return forms


@dataclass(frozen=True)
class ClassGroup:
    """O_d 的理想類群，forms 內為兩兩相異的約化型"""
    d: int
    D: int
    forms: tuple

    @property
    def c_d(self) -> int:
        return len(self.forms)

    @property
    def principal(self) -> QuadForm:
        return principal_form(self.D)

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.forms)

    def __contains__(self, f) -> bool:
        return f in self._members

    def __len__(self):
        return len(self.forms)

    def __iter__(self):
        return iter(self.forms)


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def class_group(d: int) -> ClassGroup:
    """
    計算 O_d 的類群（依 d 快取）

    Args:
        d: 正的無平方因子整數

    Returns:
        ClassGroup: 約化型列表與類數 c_d
    """
    cached = _CACHE.get(d)
    if cached is not None:
        return cached
    D = discriminant_of(d)
    group = ClassGroup(d=d, D=D, forms=tuple(reduced_forms(D)))
    with _CACHE_LOCK:
        group = _CACHE.setdefault(d, group)
    logger.debug(f"類群 d={d} D={D} c_d={group.c_d}")
    return group


def form_order(f: QuadForm, G: ClassGroup) -> int:
    """
    f 在 G 中的階：最小的 s ≥ 1 使 f^s 為單位型
    """
    if f not in G:
        raise DomainError(f"{f} 不是 d={G.d} 類群中的約化型")
    principal = G.principal
    current, s = f, 1
    while current != principal:
        current = compose(current, f)
        s += 1
        if s > G.c_d:
            raise DomainError(f"{f} 的階超過類數 {G.c_d}")
    return s


def prime_form(p: int, D: int):
    """
    範數為質數 p 的二次型 (p, B, C)，取 0 ≤ B ≤ p；p 在 D 中惰性時回傳 None
    """
    for b in range(0, p + 1):
        if (b - D) % 2 == 0 and (b * b - D) % (4 * p) == 0:
            return QuadForm(p, b, (b * b - D) // (4 * p))
    return None


def minkowski_bound(D: int) -> float:
    """每個理想類都含有範數不超過此界的理想"""
    return 2.0 / math.pi * math.sqrt(-D)


def class_number_by_closure(d: int) -> int:
    """
    以另一條路徑計算類數：Minkowski 界內的質理想型在合成下生成的封閉集合大小
    """
    D = discriminant_of(d)
    generators = []
    for p in primes_up_to(int(minkowski_bound(D)) + 1):
        f = prime_form(p, D)
        if f is not None:
            generators.append(reduce(f))

    seen = {principal_form(D)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for h in frontier:
            for g in generators:
                k = compose(h, g)
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return len(seen)
