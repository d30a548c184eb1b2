"""API error handlers for the report API."""

from functools import wraps
from typing import Any, Callable, Tuple, Union

from flask import Flask, Response, jsonify
from pydantic import ValidationError as PydanticValidationError

from src.factoriza.utils.exceptions import (
    APIError,
    BaseAppException,
    CapExceededError,
    SelectorError,
    ValidationError,
)


def _pydantic_details(e: PydanticValidationError) -> list[dict[str, Any]]:
    details = []
    for error in e.errors():
        details.append(
            {
                "loc": list(error.get("loc", [])),
                "msg": error.get("msg", ""),
                "type": error.get("type", ""),
            }
        )
    return details


def _status_for(e: BaseAppException) -> int:
    if isinstance(e, APIError):
        return e.status_code
    if isinstance(e, (SelectorError, ValidationError)):
        return 400
    if isinstance(e, CapExceededError):
        return 413
    return 500


def api_error_handler(f: Callable) -> Callable:
    """Decorator that turns factoriza errors into JSON responses.

    Args:
        f: The view function to decorate.

    Returns:
        Decorated function.
    """

    @wraps(f)
    def decorated(*args, **kwargs) -> Union[Tuple[Response, int], Any]:
        try:
            return f(*args, **kwargs)
        except BaseAppException as e:
            response = {"error": e.message, "code": e.code}
            if e.details:
                response["details"] = e.details
            return jsonify(response), _status_for(e)
        except PydanticValidationError as e:
            return jsonify({"error": "Validation error", "details": _pydantic_details(e)}), 400
        except Exception as e:
            return jsonify({"error": f"Unexpected error: {e!s}"}), 500

    return decorated


def register_error_handlers(app: Flask) -> None:
    """Register error handlers with the Flask application.

    Args:
        app: Flask application instance.
    """

    @app.errorhandler(404)
    def not_found(e) -> Tuple[Response, int]:
        """Handle not found errors."""
        return jsonify({"error": "Resource not found"}), 404

    @app.errorhandler(500)
    def internal_server_error(e) -> Tuple[Response, int]:
        """Handle internal server errors."""
        return jsonify({"error": "Internal server error"}), 500

    @app.errorhandler(BaseAppException)
    def handle_app_error(e: BaseAppException) -> Tuple[Response, int]:
        """Handle factoriza errors raised outside decorated views."""
        return jsonify({"error": e.message, "code": e.code}), _status_for(e)

    @app.errorhandler(PydanticValidationError)
    def handle_validation_error(e: PydanticValidationError) -> Tuple[Response, int]:
        """Handle Pydantic validation errors."""
        return jsonify({"error": "Validation error", "details": _pydantic_details(e)}), 400
