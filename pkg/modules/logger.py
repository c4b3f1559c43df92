"""
日誌模組 - 工具箱的日誌設定

所有紀錄都寫到 stderr（DEBUG 模式另存 debug.log），stdout 只留給指令結果，
所以同一個指令的輸出可以逐位元組比對。
"""
import logging
import sys

from .config import DEBUG_MODE, LOG_LEVEL

PACKAGE_LOGGER = "modules"

_FORMATS = {
    "debug": "%(asctime)s - %(levelname)s - %(name)s.%(funcName)s:%(lineno)d - %(message)s",
    "default": "%(asctime)s - %(message)s",
}


def setup_logger(debug: bool = DEBUG_MODE, level: str = None) -> logging.Logger:
    """
    設定工具箱的日誌（重複呼叫只會換掉原本的 handler）

    Args:
        debug: 開啟 DEBUG 等級並另存 debug.log
        level: 覆寫等級名稱（例如 WARNING），預設取 LOG_LEVEL

    Returns:
        logging.Logger: 套件層級的 logger
    """
    package = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(package.handlers):
        package.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(_FORMATS["debug" if debug else "default"])
    handlers = [logging.StreamHandler(sys.stderr)]
    if debug:
        handlers.append(logging.FileHandler("debug.log", encoding="utf-8"))
        print("🐛 DEBUG模式已啟用，詳細日誌將保存到 debug.log", file=sys.stderr)
    for handler in handlers:
        handler.setFormatter(formatter)
        package.addHandler(handler)

    package.setLevel(logging.DEBUG if debug else getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO))
    package.propagate = False

    package.debug("=== 測地角工具箱啟動 ===")
    return package


def get_logger(name=__name__):
    """取得 logger；main 以外的名稱都掛在 modules 底下"""
    if name == "__main__" or not name.startswith(PACKAGE_LOGGER):
        name = f"{PACKAGE_LOGGER}.{name}"
    return logging.getLogger(name)
