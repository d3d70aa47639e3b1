"""
工具模組包 - 共用實用工具
"""
