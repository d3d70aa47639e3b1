"""
日誌工具 - 彩色主控台日誌 (stderr) 與可選的輪替檔案日誌
"""

import sys
import logging
import colorlog
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional

from ..config import settings

# 可用的日誌等級名稱
LOG_LEVELS = {name: getattr(logging, name) for name in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')}

# 顏色映射
COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'bold_red'
}

ROOT_NAME = 'finsler_engine'


class Logger:
    """日誌管理類"""

    _instance = None

    def __new__(cls):
        """單例模式確保只有一個日誌實例"""
        if cls._instance is None:
            cls._instance = super(Logger, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """建立套件根記錄器與主控台處理器"""
        if self._initialized:
            return

        log_level = LOG_LEVELS.get(str(settings.get('logging.level', 'INFO')).upper(), logging.INFO)

        # 套件根記錄器，不往 root 傳遞
        self.logger = logging.getLogger(ROOT_NAME)
        self.logger.setLevel(log_level)
        self.logger.propagate = False

        # 重複初始化時不累積處理器
        if self.logger.handlers:
            self.logger.handlers.clear()

        # 控制台處理器寫到 stderr，stdout 保留給 CSV/JSON 輸出
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(log_level)
        console_handler.setFormatter(colorlog.ColoredFormatter(
            '%(log_color)s%(asctime)s [%(levelname)s] %(name)s: %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S',
            log_colors=COLORS
        ))
        self.logger.addHandler(console_handler)

        log_file = settings.get('logging.file')
        if log_file:
            self.add_file_handler(log_file)

        self._initialized = True

    def add_file_handler(self, path: str) -> None:
        """
        啟用輪替檔案日誌

        Args:
            path: 日誌檔案路徑
        """
        log_path = Path(path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=10*1024*1024,  # 10 MB
            backupCount=10,
            encoding='utf-8'
        )
        file_handler.setLevel(self.logger.level)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s [%(levelname)s] %(name)s: %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        self.logger.addHandler(file_handler)

    def set_level(self, level_name: Optional[str]) -> None:
        """
        調整所有處理器的日誌等級

        Args:
            level_name: 等級名稱，例如 'DEBUG'；None 表示不變
        """
        if not level_name:
            return
        level = LOG_LEVELS.get(level_name.upper())
        if level is None:
            raise ValueError(f"未知的日誌等級: {level_name}")
        self.logger.setLevel(level)
        for handler in self.logger.handlers:
            handler.setLevel(level)

    def get_logger(self, name=ROOT_NAME):
        """取得掛在 finsler_engine 根記錄器下的命名記錄器"""
        logger = logging.getLogger(name)
        if name != ROOT_NAME and not name.startswith(ROOT_NAME + '.'):
            logger.parent = self.logger
        return logger


# 全局日誌實例
logger_manager = Logger()


def get_logger(name):
    """模組層級的捷徑，通常以 get_logger(__name__) 呼叫"""
    return logger_manager.get_logger(name)
