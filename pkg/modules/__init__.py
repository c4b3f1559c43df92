"""
測地角工具箱 - 模組套件
以理想類群與二次型分解測地角，並計算多面體的 Dehn 不變量
"""

__version__ = "1.0.0"
