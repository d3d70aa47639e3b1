"""
純量場引擎包 - 截斷 Taylor jet 與叢座標上的微分運算
"""
