"""Exception hierarchy shared across the package."""


class DiracNodalError(Exception):
    """Base class for all errors raised by this package."""


class MalformedConfig(DiracNodalError):
    """Config text is not syntactically valid JSON."""


class InvalidValue(DiracNodalError):
    """A config or argument value violates an invariant.

    Carries the offending field path (dotted, with [i] for list items).
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class BracketFailure(DiracNodalError):
    """No sign change of the characteristic function around an eigenvalue seed.

    Usually means the grid resolution is too low or the index is too small
    for asymptotic seeding.
    """

    def __init__(self, index: int, message: str = ""):
        detail = f" ({message})" if message else ""
        super().__init__(f"no eigenvalue bracket for index n={index}{detail}")
        self.index = index


class NoConvergence(DiracNodalError):
    """A fixed-point iteration did not converge within its iteration cap."""


class EmptyLevel(DiracNodalError):
    """A nodal-data level has no nodes."""

    def __init__(self, n: int):
        super().__init__(f"nodal level n={n} is empty or missing")
        self.n = n


class DegenerateAlpha(DiracNodalError):
    """sin(2 alpha) is too small to recover the mass and no known mass was supplied."""


class WindowTooLarge(DiracNodalError):
    """Smoothing window does not fit the sample length."""
