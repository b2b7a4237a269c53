"""
Custom exception classes for hugkit.
Every numerical failure surfaces as a HugError subclass with a stable code.
"""
from typing import Optional, Any, Dict


class HugError(Exception):
    """
    Base exception class for hugkit.
    All custom exceptions should inherit from this.
    """
    def __init__(
        self,
        message: str,
        code: str = "HUG_ERROR",
        status_code: int = 500,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.code = code
        self.status_code = status_code
        self.details = details or {}
        super().__init__(self.message)


class InvalidInputError(HugError):
    """Raised when a value violates a type invariant at construction."""
    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(
            message=message,
            code="INVALID_INPUT",
            status_code=400,
            details={"field": field} if field else {}
        )


class ZeroRowError(HugError):
    """Raised when a row cannot be normalized."""
    def __init__(self, index: int):
        self.index = index
        super().__init__(
            message=f"Row {index} has (near) zero norm",
            code="ZERO_ROW",
            status_code=422,
            details={"index": index}
        )


class CoincidentPointsError(HugError):
    """Raised when a singular kernel meets two coincident points."""
    def __init__(self, i: int, j: int, what: str = "points"):
        self.pair = (i, j)
        super().__init__(
            message=f"Coincident {what} at indices ({i}, {j})",
            code="COINCIDENT_POINTS",
            status_code=422,
            details={"i": i, "j": j, "what": what}
        )


class DegenerateMeanError(HugError):
    """Raised when a centered class mean vanishes."""
    def __init__(self, class_index: Optional[int] = None):
        self.class_index = class_index
        message = "Degenerate class means"
        if class_index is not None:
            message = f"Centered mean of class {class_index} vanishes"
        super().__init__(
            message=message,
            code="DEGENERATE_MEAN",
            status_code=422,
            details={"class_index": class_index}
        )


class SingularGramError(HugError):
    """Raised when the Gaussian kernel Gram matrix is not positive definite."""
    def __init__(self, pivot: Optional[float] = None):
        super().__init__(
            message="Gram matrix is numerically singular",
            code="SINGULAR_GRAM",
            status_code=422,
            details={"pivot": pivot}
        )


class SingularCayleyError(HugError):
    """Raised when I + A cannot be inverted in the Cayley map."""
    def __init__(self, pivot: Optional[float] = None):
        super().__init__(
            message="Cayley transform is numerically singular",
            code="SINGULAR_CAYLEY",
            status_code=422,
            details={"pivot": pivot}
        )


class NonFiniteError(HugError):
    """Raised when an optimizer update produces NaN or inf."""
    def __init__(self, iteration: Optional[int] = None):
        self.iteration = iteration
        message = "Non-finite values after update"
        if iteration is not None:
            message = f"Non-finite values after update at iteration {iteration}"
        super().__init__(
            message=message,
            code="NON_FINITE",
            status_code=500,
            details={"iteration": iteration}
        )


class DimensionTooSmallError(HugError):
    """Raised when a construction needs more ambient dimensions."""
    def __init__(self, count: int, dim: int):
        super().__init__(
            message=f"Cannot place {count} simplex vertices in dimension {dim}",
            code="DIMENSION_TOO_SMALL",
            status_code=422,
            details={"count": count, "dim": dim}
        )


class WrongCountError(HugError):
    """Raised when a point count does not match the requested structure."""
    def __init__(self, expected: int, actual: int):
        super().__init__(
            message=f"Expected {expected} points, got {actual}",
            code="WRONG_COUNT",
            status_code=422,
            details={"expected": expected, "actual": actual}
        )


class DivergentError(HugError):
    """Raised when a continuous energy integral does not exist."""
    def __init__(self, s: float, d: int):
        super().__init__(
            message=f"Riesz s={s} energy diverges on the sphere in R^{d} (needs s < d-1)",
            code="DIVERGENT",
            status_code=422,
            details={"s": s, "d": d}
        )


class EmptyClassError(HugError):
    """Raised when a class ends up with no samples."""
    def __init__(self, class_index: int):
        super().__init__(
            message=f"Class {class_index} has no samples",
            code="EMPTY_CLASS",
            status_code=422,
            details={"class_index": class_index}
        )


class ParseError(HugError):
    """Raised when a persisted document cannot be read."""
    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        field: Optional[str] = None
    ):
        self.line = line
        self.field = field
        details = {}
        if line is not None:
            details["line"] = line
        if field is not None:
            details["field"] = field
        super().__init__(
            message=message,
            code="PARSE_ERROR",
            status_code=400,
            details=details
        )


class SchemaVersionMismatchError(HugError):
    """Raised when a document was written by an incompatible schema version."""
    def __init__(self, found: Any, supported: int):
        super().__init__(
            message=f"Unsupported schema version {found} (supported: {supported})",
            code="SCHEMA_VERSION_MISMATCH",
            status_code=400,
            details={"found": found, "supported": supported}
        )
