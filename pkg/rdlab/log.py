# log.py
"""Console logging setup with colored level names."""

import logging

from colorama import Fore, Style, init as colorama_init

_LEVEL_COLORS = {
    logging.DEBUG: Fore.CYAN,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT,
}


class ColoredFormatter(logging.Formatter):
    """Formatter that colors the level name when colors are enabled."""

    def __init__(self, fmt: str, colored: bool = True):
        super().__init__(fmt)
        self.colored = colored

    def format(self, record: logging.LogRecord) -> str:
        if not self.colored:
            return super().format(record)
        saved = record.levelname
        record.levelname = f"{_LEVEL_COLORS.get(record.levelno, '')}{saved}{Style.RESET_ALL}"
        try:
            return super().format(record)
        finally:
            record.levelname = saved


def configure_logging(level: str = "INFO", colored: bool = True) -> None:
    """Configure the root logger for console use. Safe to call more than once."""
    colorama_init()
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_rdlab", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler._rdlab = True
    handler.setFormatter(ColoredFormatter("%(levelname)s %(name)s: %(message)s", colored=colored))
    root.addHandler(handler)
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    logging.captureWarnings(True)
