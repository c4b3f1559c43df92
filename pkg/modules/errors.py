"""
錯誤模組 - 例外階層與 CLI 結束碼
"""


class GeodeticError(ValueError):
    """所有工具箱錯誤的基底類別"""
    kind = "internal"
    exit_code = 3

    def __init__(self, detail):
        super().__init__(detail)
        self.detail = str(detail)

    def to_dict(self):
        """轉成 CLI JSON 錯誤格式"""
        return {"error": {"kind": self.kind, "detail": self.detail}}


class ParseError(GeodeticError):
    """輸入文字無法解析（訊息中會指出出錯的片段）"""
    kind = "parse"
    exit_code = 1


class DomainError(GeodeticError):
    """輸入違反前置條件，例如 d 不是無平方因子數"""
    kind = "domain"
    exit_code = 1


class ResourceLimitError(GeodeticError):
    """超出設定的因數分解或精度上限"""
    kind = "resource"
    exit_code = 2


class InconsistencyError(GeodeticError):
    """數學上不可能出現的狀態"""
    kind = "internal"
    exit_code = 3
