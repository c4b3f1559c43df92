"""
配置模組 - 集中管理所有環境變數和設定
"""
import os
from dataclasses import dataclass, replace

from dotenv import load_dotenv

load_dotenv()


def _int_env(name, default):
    """讀取整數環境變數，支援 2**64 這類冪次寫法"""
    raw = os.environ.get(name, "").strip().replace("_", "")
    if not raw:
        return default
    if "**" in raw:
        base, _, exponent = raw.partition("**")
        return int(base) ** int(exponent)
    return int(raw)


# ===== Debug 設定 =====
DEBUG_MODE = os.environ.get("DEBUG_MODE", "false").lower() == "true"
LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO").strip().upper()

# ===== 精度設定 =====
PRECISION_BITS = _int_env("PRECISION_BITS", 256)
MAX_PRECISION_BITS = _int_env("MAX_PRECISION_BITS", 8192)
DISPLAY_PRECISION_BITS = 128  # 表格十進位輸出使用的區間精度
DISPLAY_DIGITS = 10

# ===== 數論運算上限 =====
FACTOR_LIMIT = _int_env("FACTOR_LIMIT", 2 ** 64)
TRIAL_DIVISION_BOUND = _int_env("TRIAL_DIVISION_BOUND", 10 ** 6)
CORNACCHIA_BRUTE_FORCE_LIMIT = _int_env("CORNACCHIA_BRUTE_FORCE_LIMIT", 10 ** 6)

# ===== 輸出設定 =====
OUTPUT_FORMAT = os.environ.get("OUTPUT_FORMAT", "text").strip().lower()

# ===== 資料設定 =====
DATA_DIR = os.environ.get("DATA_DIR", os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data"))
ARCHIMEDEAN_YAML = os.environ.get("ARCHIMEDEAN_YAML", os.path.join(DATA_DIR, "archimedean.yaml"))


@dataclass(frozen=True)
class Config:
    """
    單次執行的設定值（CLI 旗標會覆寫環境變數預設值）

    Args:
        precision_bits: 區間運算精度（至少 64 bits）
        factor_limit: 因數分解可處理的最大合成數餘因子
        output: 輸出格式 text 或 json
    """
    precision_bits: int = PRECISION_BITS
    factor_limit: int = FACTOR_LIMIT
    output: str = OUTPUT_FORMAT

    def __post_init__(self):
        from .errors import DomainError

        if self.precision_bits < 64:
            raise DomainError(f"precision_bits 必須 >= 64，收到 {self.precision_bits}")
        if self.output not in ("text", "json"):
            raise DomainError(f"output 只能是 text 或 json，收到 {self.output!r}")
        if self.factor_limit < 2:
            raise DomainError(f"factor_limit 必須 >= 2，收到 {self.factor_limit}")

    @classmethod
    def from_env(cls):
        """從環境變數建立設定"""
        return cls(precision_bits=PRECISION_BITS, factor_limit=FACTOR_LIMIT, output=OUTPUT_FORMAT)

    def with_overrides(self, **changes):
        """回傳覆寫部分欄位後的新設定（None 代表不覆寫）"""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
