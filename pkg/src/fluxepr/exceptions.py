"""Exception types raised by fluxepr."""


class ContractError(ValueError):
    """An operand violates a numerical precondition (shape, hermiticity, range)."""


class ConfigError(ValueError):
    """A configuration or report file failed to parse or validate.

    ``path`` is a JSON pointer (for configs) or ``line N`` (for CSV reports).
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ConvergenceError(RuntimeError):
    """An iterative solve did not reach its tolerance.

    The last iterate and residual are kept on the instance so callers can
    inspect how far off the solve was.
    """

    def __init__(self, message, last=None, residual=None):
        self.last = last
        self.residual = residual
        super().__init__(message)
