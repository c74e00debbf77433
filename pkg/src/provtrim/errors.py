"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ProvtrimError(Exception):
    """Base class for all provtrim errors."""


class InvalidCoefficientError(ProvtrimError):
    """A monomial coefficient is NaN or infinite."""


class UnboundVariableError(ProvtrimError):
    """A valuation is missing an assignment for a variable."""

    def __init__(self, name: str):
        super().__init__(f"no assignment for variable {name!r}")
        self.name = name


class ParseError(ProvtrimError):
    """A JSON document does not conform to the expected schema."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class InvalidForestError(ProvtrimError):
    """An abstraction forest violates its structural invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class EmptyTreeError(ProvtrimError):
    """Cleaning removed every leaf of an abstraction tree."""


class UnknownLabelError(ProvtrimError):
    """A label does not occur in the abstraction forest."""

    def __init__(self, label: str):
        super().__init__(f"label {label!r} does not occur in the forest")
        self.label = label


class CompatibilityError(ProvtrimError):
    """The polynomials and abstraction forest cannot be combined."""

    def __init__(self, violations):
        lines = "; ".join(str(v) for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        super().__init__(f"{lines}{more}")
        self.violations = list(violations)


class InvalidVvsError(ProvtrimError):
    """A label set is not a valid cut of the forest."""


class BoundError(ProvtrimError):
    """A size or granularity bound is outside its legal range."""


class TooManyCutsError(ProvtrimError):
    """Exhaustive cut enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"forest has {count} cuts, above the cap of {cap}")
        self.count = count
        self.cap = cap


class InvalidPairError(ProvtrimError):
    """A metavariable pair is not strictly ordered or out of range."""


class InvalidGraphError(ProvtrimError):
    """A graph instance violates the reduction's preconditions."""
