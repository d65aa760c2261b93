"""Exception hierarchy shared by every module."""


class SymroofError(Exception):
    """Base class for all library errors."""


class DomainError(SymroofError, ValueError):
    """A numeric argument lies outside the region where the quantity is defined."""


class StructuralError(SymroofError, ValueError):
    """Shapes or dimensions of the inputs do not fit together."""


class RegistrationError(SymroofError, ValueError):
    """A user-supplied function handle violates its registration contract."""


class UnsupportedQueryError(SymroofError):
    """The requested query has no closed answer for this family."""


class UnsupportedRegionError(UnsupportedQueryError):
    """The family point lies in a region where no roof formula is known."""

    def __init__(self, message, region_label=None):
        super().__init__(message)
        self.region_label = region_label


class IndeterminateRegimeError(SymroofError):
    """A generalized entropy could not be classified as strictly convex or concave."""


class SolverError(SymroofError):
    """A numerical optimization failed to produce a feasible point."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
