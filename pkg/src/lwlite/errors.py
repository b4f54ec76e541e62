"""Exception hierarchy shared by every phase."""

from __future__ import annotations


class LwError(Exception):
    """Base class; carries an optional source span ``(start, end)``."""

    phase = "error"

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self, source: str | None = None, path: str = "<input>") -> str:
        if self.span is None or source is None:
            return f"{path}: {self.phase}: {self.message}"
        line, col = line_col(source, self.span[0])
        return f"{path}:{line}:{col}: {self.phase}: {self.message}"


class LexError(LwError):
    phase = "lex error"


class ParseError(LwError):
    phase = "parse error"


class TypingError(LwError):
    phase = "type error"


class UnifyError(TypingError):
    pass


class KindError(TypingError):
    pass


class EvalError(LwError):
    phase = "runtime error"


def line_col(source: str, offset: int) -> tuple[int, int]:
    offset = max(0, min(offset, len(source)))
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col
