"""
Finsler 曲面引擎主程式 - 命令列入口點
"""

import argparse
import sys
from typing import List, Optional

from .cli.commands import COMMANDS
from .cli.output import write_output
from .config import ConfigurationError, load_run_config
from .engine.scalar_field import EvaluationError
from .utils.logging import LOG_LEVELS, get_logger, logger_manager

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    """建立命令列解析器"""
    from . import __version__

    parser = argparse.ArgumentParser(
        prog='finsler',
        description='Finsler 曲面的不變量計算、曲線積分與恆等式驗證')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('command', choices=sorted(COMMANDS), help='子指令')
    parser.add_argument('--config', required=True, help='JSON 執行設定檔')
    parser.add_argument('--out', default=None, help='輸出檔路徑，預設為設定檔的 output 或標準輸出')
    parser.add_argument('--jobs', type=int, default=1, help='平行執行緒數 (預設 1)')
    parser.add_argument('--log-level', default=None, choices=sorted(LOG_LEVELS),
                        help='日誌等級，覆寫預設設定')
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    執行一個子指令

    Args:
        argv: 命令列參數，None 時取 sys.argv

    Returns:
        結束碼：0 通過、1 執行或驗證失敗、2 設定錯誤
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse 以 2 表示用法錯誤，--help/--version 為 0
        return int(e.code or 0)

    logger_manager.set_level(args.log_level)
    if args.jobs < 1:
        logger.critical(f"--jobs 必須至少為 1: {args.jobs}")
        return EXIT_CONFIG

    try:
        config = load_run_config(args.config)
        logger.info(f"執行 {args.command}: 設定檔 {args.config}")
        result = COMMANDS[args.command](config, args.jobs)
        write_output(result.content, args.out or config.output)
    except ConfigurationError as e:
        logger.critical(f"配置錯誤: {str(e)}")
        return EXIT_CONFIG
    except EvaluationError as e:
        logger.error(f"求值失敗: {str(e)}")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.info("收到鍵盤中斷，正在結束...")
        return EXIT_FAILURE
    except Exception as e:
        logger.critical(f"執行 {args.command} 時發生未預期錯誤: {str(e)}", exc_info=True)
        return EXIT_FAILURE

    if result.exit_code != EXIT_OK:
        logger.warning(f"{args.command} 結束碼 {result.exit_code}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(run())
