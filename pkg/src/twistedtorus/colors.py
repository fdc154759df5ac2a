"""ANSI color codes for terminal output"""

import sys


class Colors:
    """ANSI color codes for terminal output"""
    GREEN = '\033[92m'
    BLUE = '\033[94m'
    YELLOW = '\033[93m'
    RED = '\033[91m'
    BOLD = '\033[1m'
    END = '\033[0m'

    @classmethod
    def enabled(cls) -> bool:
        """Colour only when stdout is a terminal, so piped output stays byte-identical"""
        return sys.stdout.isatty()

    @classmethod
    def paint(cls, color: str, text: str) -> str:
        """Wrap text in a colour code when colouring is enabled"""
        if not cls.enabled():
            return text
        return f"{color}{text}{cls.END}"

    @classmethod
    def passed(cls, text: str = "PASS") -> str:
        return cls.paint(cls.GREEN, text)

    @classmethod
    def failed(cls, text: str = "FAIL") -> str:
        return cls.paint(cls.RED, text)

    @classmethod
    def heading(cls, text: str) -> str:
        return cls.paint(cls.BOLD, text)

    @classmethod
    def warning(cls, msg: str) -> None:
        """Print warning message to stderr"""
        print(cls.paint(cls.YELLOW, f"warning: {msg}"), file=sys.stderr)

    @classmethod
    def error(cls, msg: str) -> None:
        """Print error message to stderr"""
        print(cls.paint(cls.RED, f"error: {msg}"), file=sys.stderr)
