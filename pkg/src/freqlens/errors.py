"""Exception types raised across the toolkit."""


class FreqlensError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(FreqlensError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, byte_offset: int, detail: str = ""):
        self.byte_offset = byte_offset
        msg = f"invalid UTF-8 at byte offset {byte_offset}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class UnknownWordError(FreqlensError):
    """A word is missing from the vocabulary or corpus under operation."""

    def __init__(self, word: str, where: str = "vocabulary"):
        self.word = word
        super().__init__(f"unknown word {word!r} (not present in {where})")


class ConfigError(FreqlensError):
    """Invalid configuration or empty inputs where data is required."""


class SimilarityUndefinedError(FreqlensError):
    """Cosine similarity requested for a zero vector."""


class EmbeddingFormatError(FreqlensError):
    """Malformed embedding file; carries the offending byte or line offset."""

    def __init__(self, message: str, *, line: int | None = None, byte_offset: int | None = None):
        self.line = line
        self.byte_offset = byte_offset
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if byte_offset is not None:
            loc.append(f"byte {byte_offset}")
        suffix = f" ({', '.join(loc)})" if loc else ""
        super().__init__(message + suffix)


class NormsParseError(FreqlensError):
    """Malformed row in a norms CSV; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class InsufficientDataError(FreqlensError):
    """Too few observations to run the requested analysis."""


class SingularDesignError(FreqlensError):
    """Design matrix is rank deficient."""
