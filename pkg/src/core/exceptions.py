"""
Exception hierarchy for kleinpack.

Every error carries a CLI exit code:
- 1: validation errors (bad input, violated invariant, corrupted preset)
- 2: budget exhaustion
"""
from typing import Optional, Any

EXIT_VALIDATION = 1
EXIT_BUDGET = 2


class KleinpackException(Exception):
    """Base exception for kleinpack."""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_VALIDATION,
        details: Optional[dict] = None
    ):
        self.message = message
        self.exit_code = exit_code
        self.details = details or {}
        super().__init__(self.message)


class ValidationError(KleinpackException):
    """Input or packing validation failed."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, EXIT_VALIDATION, details)


class ParseError(KleinpackException):
    """Config text could not be parsed."""

    def __init__(self, message: str, line: int = 0, column: int = 0, details: Optional[dict] = None):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})", EXIT_VALIDATION, details)


class SingularMatrix(KleinpackException):
    """Matrix with zero determinant has no inverse."""

    def __init__(self, message: str = "Matrix is singular", details: Optional[dict] = None):
        super().__init__(message, EXIT_VALIDATION, details)


class DenominatorClash(KleinpackException):
    """An entry denominator shares a factor with the modulus."""

    def __init__(self, denominator: int, modulus: int, details: Optional[dict] = None):
        message = f"Denominator {denominator} is not invertible modulo {modulus}"
        super().__init__(message, EXIT_VALIDATION, details)


class BadPrime(KleinpackException):
    """Prime excluded from the closed-form local analysis."""

    def __init__(self, p: int, reason: str, details: Optional[dict] = None):
        super().__init__(f"Bad prime {p}: {reason}", EXIT_VALIDATION, details)


class NotCoprime(KleinpackException):
    """Column entries are not coprime."""

    def __init__(self, a: int, c: int, details: Optional[dict] = None):
        super().__init__(f"gcd({a}, {c}) != 1", EXIT_VALIDATION, details)


class NotRationalScaling(KleinpackException):
    """No admissible rational scaling makes the form primitive integral."""

    def __init__(self, message: str = "Form has no rational primitive scaling", details: Optional[dict] = None):
        super().__init__(message, EXIT_VALIDATION, details)


class IntegralityError(KleinpackException):
    """A scaled curvature is not an integer."""

    def __init__(self, message: str = "Scaled curvature is not integral", details: Optional[dict] = None):
        super().__init__(message, EXIT_VALIDATION, details)


class RankDeficient(KleinpackException):
    """Lie-algebra span has rank below 6."""

    def __init__(self, rank: int, details: Optional[dict] = None):
        super().__init__(f"Conjugate span has rank {rank} < 6", EXIT_VALIDATION, details)


class NotGenerating(KleinpackException):
    """Generating multiset does not generate the group."""

    def __init__(self, components: int, details: Optional[dict] = None):
        super().__init__(f"Cayley graph has {components} components", EXIT_VALIDATION, details)


class CheegerViolation(KleinpackException):
    """Exact Cheeger sandwich failed."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message, EXIT_VALIDATION, details)


class PresetCorrupted(KleinpackException):
    """A built-in preset fails its identity checks."""

    def __init__(self, failures: Any, details: Optional[dict] = None):
        super().__init__(f"Preset identities failed: {failures}", EXIT_VALIDATION, details)


class BudgetExceeded(KleinpackException):
    """Computation would exceed the configured budget."""

    def __init__(self, what: str, estimate: int, budget: int, details: Optional[dict] = None):
        self.estimate = estimate
        self.budget = budget
        message = f"{what} needs about {estimate} items, budget is {budget}"
        super().__init__(message, EXIT_BUDGET, details)


class ScaleTooLarge(BudgetExceeded):
    """Norm-ball family exceeds the budget."""

    def __init__(self, estimate: int, budget: int, details: Optional[dict] = None):
        super().__init__("Norm-ball family", estimate, budget, details)
