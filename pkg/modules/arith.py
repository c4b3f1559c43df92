"""
基礎算術模組 - 整數因數分解、模平方根、Cornacchia 表示與區間實數

所有函式都是純函式，回傳不可變的值，可在多執行緒中直接共用。
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath.libmp import from_int, from_rational, mpf_le, mpf_lt, round_ceiling, round_floor, to_rational, to_str
from mpmath.libmp.libmpi import (
    mpi_add,
    mpi_atan,
    mpi_div,
    mpi_mid,
    mpi_mul,
    mpi_neg,
    mpi_pi,
    mpi_sqrt,
    mpi_sub,
)
from sympy import isprime as _sympy_isprime
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod

from .config import CORNACCHIA_BRUTE_FORCE_LIMIT, FACTOR_LIMIT, TRIAL_DIVISION_BOUND
from .errors import DomainError, ResourceLimitError
from .logger import get_logger

logger = get_logger(__name__)

Rat = Fraction

# Miller–Rabin 底數集合，對 n < 2**64 為確定性判定
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# 區間運算額外使用的保護位元
GUARD_BITS = 16


# ===== 質數判定與因數分解 =====

def is_prime(n: int) -> bool:
    """
    判斷 n 是否為質數

    n < 2**64 時使用確定性 Miller–Rabin，更大的數交給 sympy（BPSW）。
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n >= 2 ** 64:
        return bool(_sympy_isprime(n))

    d, s = n - 1, 0
    while d & 1 == 0:
        d >>= 1
        s += 1

    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Brent 版 Pollard rho，回傳 n 的一個非平凡因數（n 為奇合成數）"""
    for c in range(1, 64):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            # 批次 gcd 跳過了因數，逐步回溯
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ResourceLimitError(f"Pollard rho 無法分解 {n}")


def _split_cofactor(n: int, limit: int, out: dict) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    if n > limit:
        raise ResourceLimitError(f"合成數餘因子 {n} 超過因數分解上限 {limit}")
    g = _pollard_brent(n)
    _split_cofactor(g, limit, out)
    _split_cofactor(n // g, limit, out)


@lru_cache(maxsize=65536)
def _factorize_cached(n: int, limit: int) -> tuple:
    found = {}

    def strip(p):
        nonlocal n
        e = valuation(n, p)
        if e:
            found[p] = e
            n //= p ** e

    strip(2)
    strip(3)
    p, step = 5, 2
    bound = TRIAL_DIVISION_BOUND
    while p <= bound and p * p <= n:
        if n % p == 0:
            strip(p)
        p += step
        step = 6 - step
    if n > 1:
        if p * p > n:
            found[n] = found.get(n, 0) + 1
        else:
            _split_cofactor(n, limit, found)
    return tuple(sorted(found.items()))


def factorize(n: int, limit: int = FACTOR_LIMIT) -> list[tuple[int, int]]:
    """
    質因數分解

    Args:
        n: 正整數
        limit: 允許以 Pollard rho 處理的最大合成數餘因子

    Returns:
        list: 依質數遞增排序的 (p, e) 列表，1 回傳空列表
    """
    if n < 1:
        raise DomainError(f"factorize 需要正整數，收到 {n}")
    return list(_factorize_cached(n, limit))


def squarefree_part(n: int) -> tuple[int, int]:
    """
    將 n 寫成 s²·d，d 無平方因子

    Returns:
        tuple: (s, d)
    """
    if n < 1:
        raise DomainError(f"squarefree_part 需要正整數，收到 {n}")
    s, d = 1, 1
    for p, e in factorize(n):
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, d


def is_squarefree(n: int) -> bool:
    """n 是否沒有大於 1 的平方因子"""
    return n >= 1 and all(e == 1 for _, e in factorize(n))


def require_squarefree(d: int) -> int:
    """檢查 d 為正的無平方因子整數，否則丟出 DomainError"""
    if not isinstance(d, int) or d < 1 or not is_squarefree(d):
        raise DomainError(f"d 必須是正的無平方因子整數，收到 {d}")
    return d


def require_prime(p: int) -> int:
    """檢查 p 為質數"""
    if not isinstance(p, int) or not is_prime(p):
        raise DomainError(f"p 必須是質數，收到 {p}")
    return p


def primes_up_to(n: int) -> list[int]:
    """埃氏篩法列出 ≤ n 的質數"""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def squarefree_up_to(n: int) -> list[int]:
    """列出 1..n 中的無平方因子數"""
    return [k for k in range(1, n + 1) if is_squarefree(k)]


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """擴展歐幾里得演算法，回傳 (g, x, y) 使 a·x + b·y = g ≥ 0"""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def valuation(n: int, p: int) -> int:
    """p 在 n 中的重數"""
    if n == 0:
        raise DomainError("0 的賦值沒有定義")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


# ===== 模平方根 =====

def legendre(c: int, p: int) -> int:
    """Legendre 符號 (c/p)，p 為奇質數"""
    ls = pow(c % p, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def sqrt_mod(c: int, p: int):
    """
    Tonelli–Shanks 求 u² ≡ c (mod p)

    Args:
        c: 任意整數
        p: 奇質數

    Returns:
        int | None: 0 ≤ u ≤ (p−1)/2 的根；c 為非剩餘時回傳 None
    """
    if p == 2 or p % 2 == 0:
        raise DomainError(f"sqrt_mod 需要奇質數模數，收到 {p}")
    c %= p
    if c == 0:
        return 0
    if legendre(c, p) != 1:
        return None

    if p % 4 == 3:
        u = pow(c, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(z, p) != -1:
            z += 1
        m, cz, t, u = s, pow(z, q, p), pow(c, q, p), pow(c, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(cz, 1 << (m - i - 1), p)
            m, cz = i, b * b % p
            t, u = t * cz % p, u * b % p
    return min(u, p - u)


# ===== Cornacchia =====

def _is_square(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _cornacchia_brute(n: int, d: int) -> list[tuple[int, int]]:
    found = []
    b = 1
    while d * b * b < n:
        a = _is_square(n - d * b * b)
        if a:
            found.append((a, b))
        b += 1
    return found


def _cornacchia_descent(n: int, d: int) -> list[tuple[int, int]]:
    """以模平方根加歐幾里得下降找出 a² + d·b² = n 的所有正解"""
    found = set()
    g = 1
    while g * g * d < n:
        if n % (g * g) == 0:
            m = n // (g * g)
            for r in _sympy_sqrt_mod(-d, m, all_roots=True) or []:
                x, y = m, r
                while y * y > m:
                    x, y = y, x % y
                rest = m - y * y
                if y > 0 and rest > 0 and rest % d == 0:
                    b = _is_square(rest // d)
                    if b and math.gcd(y, b) == 1:
                        found.add((g * y, g * b))
        g += 1
    return sorted(found, key=lambda ab: (ab[1], ab[0]))


def cornacchia(m: int, d: int, brute_force_limit: int = CORNACCHIA_BRUTE_FORCE_LIMIT):
    """
    解 a² + d·b² = 4m，a, b > 0

    a, b 的奇偶性自動落在 O_d 允許的範圍：d ≢ 3 (mod 4) 時兩者皆偶數。
    有多組解時回傳 b 最小的一組。

    Args:
        m: 正整數
        d: 正的無平方因子整數
        brute_force_limit: 4m/d 不超過此值時直接窮舉 b

    Returns:
        tuple | None: (a, b)，無解時回傳 None
    """
    if m < 1:
        raise DomainError(f"cornacchia 需要 m ≥ 1，收到 {m}")
    require_squarefree(d)
    n = 4 * m
    if n <= brute_force_limit * d:
        solutions = _cornacchia_brute(n, d)
    else:
        solutions = _cornacchia_descent(n, d)
        if not solutions and math.gcd(n, d) > 1:
            logger.warning(f"⚠️ cornacchia({m}, {d}) 下降法無解且 gcd(4m, d) > 1，改用窮舉")
            solutions = _cornacchia_brute(n, d)
    if not solutions:
        return None
    return min(solutions, key=lambda ab: ab[1])


# ===== 區間實數 =====

def _to_fraction(raw) -> Fraction:
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


@dataclass(frozen=True)
class RealInterval:
    """
    閉區間 [lo, hi]，端點為二進位浮點數

    每個運算都以向外捨入計算，結果必定包含精確值。
    precision 是呼叫端要求的位元數，實際運算多用 GUARD_BITS 位元。
    """
    raw: tuple
    precision: int

    @property
    def _wp(self) -> int:
        return self.precision + GUARD_BITS

    # ----- 建構 -----

    @classmethod
    def exact(cls, value, precision: int):
        """由整數或有理數建立包含它的最小區間"""
        q = Fraction(value)
        wp = precision + GUARD_BITS
        lo = from_rational(q.numerator, q.denominator, wp, round_floor)
        hi = from_rational(q.numerator, q.denominator, wp, round_ceiling)
        return cls((lo, hi), precision)

    @classmethod
    def pi(cls, precision: int):
        """π 的區間"""
        return cls(mpi_pi(precision + GUARD_BITS), precision)

    def _coerce(self, other):
        if isinstance(other, RealInterval):
            return other
        if isinstance(other, (int, Fraction)):
            return RealInterval.exact(other, self.precision)
        return NotImplemented

    def _wrap(self, raw, other=None):
        prec = self.precision if other is None else min(self.precision, other.precision)
        return RealInterval(raw, prec)

    # ----- 算術 -----

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(mpi_add(self.raw, other.raw, self._wp), other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(mpi_sub(self.raw, other.raw, self._wp), other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(mpi_mul(self.raw, other.raw, self._wp), other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.sign() == 0:
            raise DomainError("除數區間包含 0")
        return self._wrap(mpi_div(self.raw, other.raw, self._wp), other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return RealInterval(mpi_neg(self.raw), self.precision)

    def sqrt(self):
        """平方根（下端點需非負）"""
        if mpf_lt(self.raw[0], from_int(0)):
            raise DomainError("負數區間無法開平方根")
        return RealInterval(mpi_sqrt(self.raw, self._wp), self.precision)

    def atan(self):
        """反正切（單調遞增，直接作用於端點）"""
        return RealInterval(mpi_atan(self.raw, self._wp), self.precision)

    # ----- 查詢 -----

    @property
    def lo(self) -> Fraction:
        return _to_fraction(self.raw[0])

    @property
    def hi(self) -> Fraction:
        return _to_fraction(self.raw[1])

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value) -> bool:
        """value 為數值或區間；區間時檢查是否為子集"""
        if isinstance(value, RealInterval):
            return mpf_le(self.raw[0], value.raw[0]) and mpf_le(value.raw[1], self.raw[1])
        q = Fraction(value)
        return self.lo <= q <= self.hi

    def overlaps(self, other) -> bool:
        """兩個區間是否相交"""
        return mpf_le(self.raw[0], other.raw[1]) and mpf_le(other.raw[0], self.raw[1])

    def sign(self) -> int:
        """整個區間為正回傳 1，為負回傳 −1，包含 0 時回傳 0"""
        zero = from_int(0)
        if mpf_lt(zero, self.raw[0]):
            return 1
        if mpf_lt(self.raw[1], zero):
            return -1
        return 0

    def __float__(self):
        return float(self.midpoint)

    def to_decimal(self, digits: int = 10) -> str:
        """中點的十進位字串（有效位數 digits）"""
        return to_str(mpi_mid(self.raw, self._wp), digits)

    def __str__(self):
        digits = max(int(self.precision * 0.30103) - 1, 5)
        return f"[{to_str(self.raw[0], digits)}, {to_str(self.raw[1], digits)}]"
