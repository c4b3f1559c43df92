"""
基底角模組 - 建構標準基底角 ⟨p⟩_d 並以區間算術求值
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import pandas as pd

from .arith import RealInterval, primes_up_to, require_prime, require_squarefree, squarefree_up_to
from .config import DISPLAY_DIGITS, DISPLAY_PRECISION_BITS
from .errors import DomainError
from .logger import get_logger
from .quad_ideals import SPLIT, PrimeIdeal, ideal_order, prime_power_generator, split_type

logger = get_logger(__name__)

TABLE_COLUMNS = ["p", "d", "status", "s", "a", "b", "radians"]
STATUS_MARKERS = {"inert": "#", "ramified": "*"}


@dataclass(frozen=True)
class BasisKey:
    """基底角的索引 (p, d)，(p) 在 O_d 中分裂"""
    p: int
    d: int

    @property
    def sort_key(self):
        return (self.d, self.p)

    def __str__(self):
        return f"<{self.p}>_{self.d}"


@dataclass(frozen=True)
class BasisAngle:
    """
    標準基底角 ⟨p⟩_d = (1/s)·arctan((b/a)√d)

    4pˢ = a² + d·b²，s 為質理想類的階。
    """
    key: BasisKey
    s: int
    a: int
    b: int
    ideal: PrimeIdeal

    @property
    def p(self) -> int:
        return self.key.p

    @property
    def d(self) -> int:
        return self.key.d

    @property
    def tan_squared(self) -> Fraction:
        """s·⟨p⟩_d 的正切平方 d·b²/a²"""
        return Fraction(self.d * self.b * self.b, self.a * self.a)

    def __str__(self):
        return str(self.key)


def canonical_ideal(p: int, d: int) -> PrimeIdeal:
    """共軛理想對中，生成元 y > 0 的那一個"""
    st = split_type(p, d)
    if st.kind != SPLIT:
        raise DomainError(f"<{p}>_{d} 沒有定義：({p}) 在 O_{d} 中為 {st.kind}")
    s = ideal_order(st.first)
    z = prime_power_generator(st.first, d, s)
    return st.first if z.y > 0 else st.second


@lru_cache(maxsize=None)
def basis_angle(p: int, d: int):
    """
    建構 ⟨p⟩_d

    Args:
        p: 質數
        d: 正的無平方因子整數

    Returns:
        BasisAngle | Inert | Ramified: (p) 不分裂時回傳分解型態標記
    """
    require_prime(p)
    require_squarefree(d)
    st = split_type(p, d)
    if st.kind != SPLIT:
        return st

    s = ideal_order(st.first)
    z = prime_power_generator(st.first, d, s)
    ideal = st.first
    if z.y < 0:
        ideal = st.second
        z = z.conjugate()
    angle = BasisAngle(BasisKey(p, d), s, z.x, z.y, ideal)
    logger.debug(f"<{p}>_{d}: s={s}, 4p^s = {z.x}² + {d}·{z.y}²")
    return angle


def require_basis_angle(p: int, d: int) -> BasisAngle:
    """取得 ⟨p⟩_d，未定義時丟出 DomainError"""
    result = basis_angle(p, d)
    if not isinstance(result, BasisAngle):
        raise DomainError(f"<{p}>_{d} 沒有定義：({p}) 在 O_{d} 中為 {result.kind}")
    return result


def evaluate(angle: BasisAngle, precision: int) -> RealInterval:
    """
    ⟨p⟩_d 的區間值，寬度 ≤ 2^(1−precision)
    """
    if precision < 32:
        raise DomainError(f"precision 至少 32 bits，收到 {precision}")
    tan_value = RealInterval.exact(angle.d, precision).sqrt() * Fraction(angle.b, angle.a)
    return tan_value.atan() / angle.s


def format_degrees(radians) -> str:
    """弧度轉成 度°分'秒\" 字串（四捨五入到秒）"""
    value = float(radians)
    sign = "-" if value < 0 else ""
    total = round(abs(value) * 180 / math.pi * 3600)
    deg, rest = divmod(total, 3600)
    minutes, seconds = divmod(rest, 60)
    return f"{sign}{deg}°{minutes:02d}'{seconds:02d}\""


def _cell(p: int, d: int) -> dict:
    result = basis_angle(p, d)
    if not isinstance(result, BasisAngle):
        return {"p": p, "d": d, "status": result.kind, "s": None, "a": None, "b": None, "radians": None}
    radians = evaluate(result, DISPLAY_PRECISION_BITS).to_decimal(DISPLAY_DIGITS)
    return {"p": p, "d": d, "status": "defined", "s": result.s, "a": result.a, "b": result.b, "radians": radians}


def basis_table(p_max: int, d_max: int) -> pd.DataFrame:
    """
    生成基底角表格

    Args:
        p_max: 列出 ≤ p_max 的質數
        d_max: 列出 ≤ d_max 的無平方因子 d

    Returns:
        DataFrame: 每個 (p, d) 一列，欄位 p, d, status, s, a, b, radians
    """
    if p_max < 2 or d_max < 1:
        raise DomainError(f"表格範圍需 p_max ≥ 2 且 d_max ≥ 1，收到 ({p_max}, {d_max})")
    rows = [_cell(p, d) for p in primes_up_to(p_max) for d in squarefree_up_to(d_max)]
    logger.info(f"✅ 基底角表格：{len(rows)} 格（p ≤ {p_max}, d ≤ {d_max}）")
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def basis_angles_for(d: int, p_max: int) -> list[BasisAngle]:
    """固定 d，列出所有 p ≤ p_max 有定義的 ⟨p⟩_d"""
    require_squarefree(d)
    found = []
    for p in primes_up_to(p_max):
        result = basis_angle(p, d)
        if isinstance(result, BasisAngle):
            found.append(result)
    return found
