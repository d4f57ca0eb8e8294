"""Exception types shared across the package."""


class TreeAugError(Exception):
    """Base class for all package errors."""


class InputError(TreeAugError, ValueError):
    """Malformed or out-of-contract input (unknown node, bad edge, ...)."""


class StateError(TreeAugError):
    """Operation requires state the object does not have (e.g. a root)."""


class SizeLimitError(TreeAugError):
    """Instance exceeds a solver's configured size limit."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class InfeasibleInstanceError(TreeAugError):
    """No link set can cover the tree; carries one uncoverable edge."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class InternalInvariantError(TreeAugError):
    """A certified internal invariant failed; indicates a bug, not bad input."""


class ParseError(TreeAugError, ValueError):
    """Instance or solution text could not be parsed."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
