"""
命令列模組包 - 子指令與輸出格式
"""
