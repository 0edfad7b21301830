"""Custom exceptions for consistent query answering over tree queries."""

import functools
from typing import Any, Callable, Optional

from lark.exceptions import LarkError, UnexpectedInput


class CQAError(Exception):
    """Base exception for all errors raised by this package."""

    def __init__(self, message: str, error_code: Optional[str] = None, errors: Optional[list] = None):
        """Initialize exception.

        Args:
            message: Error message
            error_code: Optional short machine-readable code
            errors: Optional list of specific error messages
        """
        super().__init__(message)
        self.error_code = error_code
        self.errors = errors or []


class ParseError(CQAError):
    """Raised when query text or a fact file does not parse."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        """Initialize exception.

        Args:
            message: Error message
            line: 1-based line of the offending input, if known
            column: 1-based column of the offending input, if known
        """
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{location}", error_code="parse")
        self.line = line
        self.column = column


class ArityError(CQAError):
    """Raised when a relation name is used with conflicting shapes."""

    def __init__(self, relation: str, message: str, line: Optional[int] = None):
        super().__init__(
            f"Relation {relation}: {message}" + (f" (line {line})" if line is not None else ""),
            error_code="arity",
        )
        self.relation = relation
        self.line = line


class ValidationError(CQAError):
    """Raised when a domain object fails validation."""

    def __init__(self, message: str, errors: Optional[list] = None):
        super().__init__(message, error_code="validation", errors=errors)


class VertexNotFoundError(ValidationError):
    """Raised when a vertex reference does not resolve in a query."""

    def __init__(self, vertex: Any):
        super().__init__(f"Vertex not found: {vertex}")
        self.vertex = vertex


class LabelMismatchError(ValidationError):
    """Raised when two vertices were expected to share a relation label."""

    def __init__(self, x: str, y: str, detail: str = "vertices must be internal and share a relation label"):
        super().__init__(f"{x}, {y}: {detail}")
        self.x = x
        self.y = y


class PreconditionError(CQAError):
    """Raised when an operation is called outside of its precondition."""

    def __init__(self, operation: str, message: str):
        """Initialize exception.

        Args:
            operation: Name of the operation whose precondition failed
            message: What was violated
        """
        super().__init__(f"{operation}: {message}", error_code="precondition")
        self.operation = operation


class NotGraphBCQError(PreconditionError):
    """Raised for queries outside the simple-key graph class."""

    def __init__(self, operation: str, errors: list):
        super().__init__(operation, "query is not in GraphBCQ: " + "; ".join(errors))
        self.errors = errors


class InconsistentDatabaseError(PreconditionError):
    """Raised when a consistent instance is required."""


class NotMinimalError(PreconditionError):
    """Raised when a query is required to be its own core."""


class SelfJoinError(PreconditionError):
    """Raised when a self-join-free query is required."""


class MethodConditionError(PreconditionError):
    """Raised when an evaluation method is forced on a query it does not fit."""


class WitnessPairError(PreconditionError):
    """Raised when a gadget witness pair does not witness the required violation."""


class FrugalComparabilityError(CQAError):
    """Raised when two frugal sets in one block are incomparable."""

    def __init__(self, block: str, first: str, second: str):
        super().__init__(
            f"Incomparable frugal sets in block {block}: {first} vs {second}",
            error_code="frugal",
        )
        self.block = block
        self.first = first
        self.second = second


class OracleCapExceeded(CQAError):
    """Raised when repair enumeration would exceed the configured cap."""

    def __init__(self, repair_count: int, cap: int):
        super().__init__(
            f"Instance has {repair_count} repairs, above the oracle cap of {cap}",
            error_code="cap",
        )
        self.repair_count = repair_count
        self.cap = cap


class ConfigurationError(CQAError):
    """Raised when there's a configuration error."""


def translate_parse_errors(func: Optional[Callable] = None, *, what: str = "input") -> Callable:
    """Decorator turning lark exceptions into ParseError.

    Args:
        func: Optional function to decorate
        what: Name of the parsed artifact used in messages

    Returns:
        Decorator function

    Usage:
        @translate_parse_errors
        def parse(text):
            pass

        @translate_parse_errors(what="fact file")
        def parse(text):
            pass
    """
    def decorator(inner: Callable[..., Any]) -> Callable[..., Any]:
        @functools.wraps(inner)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return inner(*args, **kwargs)
            except UnexpectedInput as e:
                token = getattr(e, "token", None)
                near = f" near {str(token)!r}" if token else ""
                raise ParseError(
                    f"Syntax error in {what}{near}",
                    line=getattr(e, "line", None),
                    column=getattr(e, "column", None),
                ) from e
            except LarkError as e:
                # Transformer callbacks re-raise as VisitError; surface our own errors
                original = getattr(e, "orig_exc", None)
                if isinstance(original, CQAError):
                    raise original from e
                raise ParseError(f"Could not parse {what}: {e}") from e
        return wrapper

    if func is None:
        return decorator
    return decorator(func)
