"""Exception types shared by the library and the command line."""


class InputError(ValueError):
    """Malformed or out-of-range input."""


class ParseError(InputError):
    """A group file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ResourceError(RuntimeError):
    """A configured cap (points, states, nucleus size) was exceeded."""


class Inconclusive(RuntimeError):
    """A search stopped at its caps without reaching a verdict."""
