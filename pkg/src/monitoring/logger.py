import logging
import os
import sys
from colorama import Fore, Style, just_fix_windows_console
from dotenv import load_dotenv

load_dotenv()

# ==== Load environment variables ====
LOG_LEVEL = os.environ.get("COURANT_LOG_LEVEL")

LEVEL_COLORS = {
    logging.DEBUG: Fore.WHITE,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT,
}

_configured = False


# ===== Define the colored formatter class =====
class ColorFormatter(logging.Formatter):
    def __init__(self, use_color: bool = True):
        super().__init__("%(levelname)s %(name)s: %(message)s")
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        if not self.use_color:
            return message
        return LEVEL_COLORS.get(record.levelno, "") + message + Style.RESET_ALL


# ==== Setup logging ====
def setup_logging(level: str | None = None, use_color: bool = True) -> logging.Logger:
    global _configured
    level_name = (level or LOG_LEVEL or "WARNING").upper()
    root = logging.getLogger()
    if not _configured:
        just_fix_windows_console()
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(ColorFormatter(use_color=use_color and sys.stderr.isatty()))
        root.addHandler(handler)
        _configured = True
    root.setLevel(getattr(logging, level_name, logging.WARNING))
    return root


def status(message: str, ok: bool | None = None, color: bool = True) -> str:
    """Console status line in the ✅ / ❌ style."""
    if ok is None:
        glyph, tint = "🔸", Fore.WHITE
    elif ok:
        glyph, tint = "✅", Fore.GREEN
    else:
        glyph, tint = "❌", Fore.RED
    line = f"{glyph} {message}"
    if color:
        return tint + line + Style.RESET_ALL
    return line


def timing(label: str, seconds: float, color: bool = True) -> str:
    line = f"⏱️ {label} took: {seconds:.2f} seconds"
    if color:
        return Fore.YELLOW + line + Style.RESET_ALL
    return line
