"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so callers should raise the most specific
class that applies rather than a bare ``ValueError``.
"""


class GowersLabError(Exception):
    exit_code = 1


class StructuralError(GowersLabError, ValueError):
    """Objects from incompatible groups or with mismatched shapes were combined."""

    exit_code = 2


class ArgumentError(GowersLabError, ValueError):
    exit_code = 2


class ResourceError(GowersLabError):
    """A computation would exceed a configured budget or memory cap.

    ``cost`` carries the estimated cost so callers can suggest a cheaper route
    (typically Monte-Carlo instead of exact evaluation).
    """

    exit_code = 3

    def __init__(self, message, cost=None, budget=None):
        super().__init__(message)
        self.cost = cost
        self.budget = budget
