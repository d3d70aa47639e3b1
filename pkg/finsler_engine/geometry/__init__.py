"""
幾何模組包 - Finsler 曲面、聯絡、Berwald 標架與不變量
"""
