import sys
import os
from datetime import datetime
from typing import Optional

from loguru import logger


class SessionLogger:
    def __init__(self, level: str = "WARNING", log_dir: Optional[str] = None):
        self.level = level
        self.log_file = None

        # 移除默认 handler，stdout 只留给命令输出
        logger.remove()
        logger.add(
            sys.stderr,
            format="{level: <8} | {message}",
            level=level,
        )

        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            self.log_file = os.path.join(log_dir, f"session_{timestamp}.log")
            # 文件里总是记录 INFO 及以上，方便事后查看普查摘要
            logger.add(
                self.log_file,
                format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {message}",
                level="INFO",
                encoding="utf-8"
            )
            logger.info(f"Session started. Log file: {self.log_file}")

    def log_command(self, name, args):
        logger.info(f"[COMMAND:{name}] {args}")

    def log_outcome(self, name, result):
        logger.info(f"[RESULT:{name}] exit={result.exit_code} success={result.success}")

    def log_error(self, name, message):
        # stderr 上的错误信息由 CLI 自己输出，这里只留记录
        logger.info(f"[ERROR:{name}] {message}")
