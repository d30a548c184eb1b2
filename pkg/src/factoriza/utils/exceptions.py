"""
Custom exceptions for factoriza
"""

from typing import Any


class BaseAppException(Exception):
    """アプリケーションの基本例外クラス"""

    def __init__(self, message: str, code: str | None = None, details: Any = None) -> None:
        self.message = message
        self.code = code or "APP_ERROR"
        self.details = details
        super().__init__(self.message)


class ValidationError(BaseAppException):
    """入力バリデーションエラー"""

    def __init__(self, message: str, details: Any = None) -> None:
        super().__init__(message, "VALIDATION_ERROR", details)


class APIError(BaseAppException):
    """API関連のエラー"""

    def __init__(self, message: str, status_code: int, details: Any = None) -> None:
        self.status_code = status_code
        super().__init__(message, f"API_ERROR_{status_code}", details)


class CapExceededError(BaseAppException):
    """A domain, coset space or field exceeded its configured cap."""

    def __init__(self, what: str, size: int, cap: int) -> None:
        super().__init__(
            f"{what} of size {size} exceeds cap {cap}",
            "CAP_EXCEEDED",
            {"what": what, "size": size, "cap": cap},
        )


class SelectorError(BaseAppException):
    """Table/row/case selectors that resolve to nothing."""

    def __init__(self, message: str, details: Any = None) -> None:
        super().__init__(message, "SELECTOR_ERROR", details)


class NotUnipotentError(BaseAppException):
    """u - 1 is not nilpotent."""

    def __init__(self, message: str = "matrix is not unipotent") -> None:
        super().__init__(message, "NOT_UNIPOTENT")


class NotInvolutionError(BaseAppException):
    """x^2 != 1 or x == 1."""

    def __init__(self, message: str = "matrix is not an involution") -> None:
        super().__init__(message, "NOT_INVOLUTION")


class NotIsometryError(BaseAppException):
    """The matrix does not preserve the form."""

    def __init__(self, message: str = "matrix is not an isometry of the form") -> None:
        super().__init__(message, "NOT_ISOMETRY")


class NotInvariantError(BaseAppException):
    """A subspace is not invariant under the acting matrix."""

    def __init__(self, message: str = "subspace is not invariant") -> None:
        super().__init__(message, "NOT_INVARIANT")


class ConstructionError(BaseAppException):
    """A builder's internal consistency assertion failed."""

    def __init__(self, message: str, details: Any = None) -> None:
        super().__init__(message, "CONSTRUCTION_ERROR", details)


class UnavailableGroupError(BaseAppException):
    """An optional group asset is not bundled."""

    def __init__(self, name: str) -> None:
        super().__init__(f"generator asset for {name} is not available", "UNAVAILABLE", name)
