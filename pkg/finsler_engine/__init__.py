"""
Finsler Engine - Finsler 曲面的不變量、曲線流與恆等式驗證
"""

__version__ = '0.1.0'
