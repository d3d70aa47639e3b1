"""
曲線流模組包 - 測地線、N-平行曲線與 N-極值曲線
"""
