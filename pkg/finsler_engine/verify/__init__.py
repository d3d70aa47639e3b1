"""
驗證模組包 - 結構方程與相關恆等式的數值檢查
"""
