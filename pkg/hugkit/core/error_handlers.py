"""
Exception handlers of the HTTP surface.

Every failure leaves as an ErrorResponse envelope. Domain errors keep their
numerical context (offending pair, pivot, field) in details; tracebacks are
only exposed with DEBUG on.
"""
import logging
import traceback
import uuid
from typing import Any, Dict, Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException

from hugkit.core.config import settings
from hugkit.core.exceptions import HugError
from hugkit.schemas.common import ErrorDetail, ErrorResponse

logger = logging.getLogger(__name__)

HTTP_CODES = {
    400: "BAD_REQUEST",
    404: "NOT_FOUND",
    405: "METHOD_NOT_ALLOWED",
    422: "UNPROCESSABLE_ENTITY",
}


def _request_id(request: Request) -> str:
    return getattr(request.state, "request_id", None) or uuid.uuid4().hex[:8]


def error_response(
    request: Request,
    code: str,
    message: str,
    status_code: int,
    details: Optional[Dict[str, Any]] = None
) -> JSONResponse:
    envelope = ErrorResponse(
        error=ErrorDetail(code=code, message=message, details=details or None),
        request_id=_request_id(request),
    )
    return JSONResponse(status_code=status_code, content=envelope.model_dump(mode="json"))


async def hug_exception_handler(request: Request, exc: HugError) -> JSONResponse:
    """Domain errors keep their code and status; 5xx ones are logged as errors."""
    level = logging.ERROR if exc.status_code >= 500 else logging.WARNING
    logger.log(
        level,
        f"{exc.code} on {request.url.path}: {exc.message}",
        extra={"request_id": _request_id(request), "error_code": exc.code, "details": exc.details}
    )
    return error_response(request, exc.code, exc.message, exc.status_code, exc.details)


async def linalg_exception_handler(request: Request, exc: np.linalg.LinAlgError) -> JSONResponse:
    logger.warning(
        f"Linear algebra failure on {request.url.path}: {exc}",
        extra={"request_id": _request_id(request), "error_code": "LINALG_ERROR"}
    )
    return error_response(request, "LINALG_ERROR", str(exc), 422)


async def http_exception_handler(request: Request, exc: HTTPException) -> JSONResponse:
    return error_response(
        request,
        HTTP_CODES.get(exc.status_code, "HTTP_ERROR"),
        str(exc.detail),
        exc.status_code
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
    """Request bodies that fail schema validation, one entry per offending field."""
    errors = [
        {
            "field": ".".join(str(part) for part in error["loc"] if part != "body"),
            "message": error["msg"],
            "type": error["type"],
        }
        for error in exc.errors()
    ]
    return error_response(
        request,
        "VALIDATION_ERROR",
        "Request validation failed",
        422,
        {"errors": errors}
    )


async def generic_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    trace = traceback.format_exc()
    logger.error(
        f"Unhandled exception on {request.url.path}: {exc}",
        extra={"request_id": _request_id(request), "details": {"traceback": trace}}
    )
    return error_response(
        request,
        "INTERNAL_ERROR",
        str(exc) if settings.DEBUG else "An unexpected error occurred",
        500,
        {"traceback": trace} if settings.DEBUG else None
    )


def register_exception_handlers(app: FastAPI) -> None:
    app.add_exception_handler(HugError, hug_exception_handler)
    app.add_exception_handler(np.linalg.LinAlgError, linalg_exception_handler)
    app.add_exception_handler(HTTPException, http_exception_handler)
    app.add_exception_handler(RequestValidationError, validation_exception_handler)
    app.add_exception_handler(Exception, generic_exception_handler)
