"""
Per-request access log with correlation ids.

Responses carry X-Request-ID and X-Response-Time. Suite runs and energy
minimizations are the slow routes, so the elapsed time goes into every
access-log line.
"""
import logging
import time
import uuid

from fastapi import Request, Response
from starlette.middleware.base import BaseHTTPMiddleware

from hugkit.core.logging_config import get_logger

logger = get_logger(__name__)

REQUEST_ID_HEADER = "X-Request-ID"
TIMING_HEADER = "X-Response-Time"


def _elapsed_ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000, 2)


class RequestLoggingMiddleware(BaseHTTPMiddleware):
    """
    Tags each request with a correlation id and logs it on entry and exit.

    A client-supplied X-Request-ID is kept; otherwise a short random id is
    issued. The id is stored on request.state for the error envelopes.
    """

    async def dispatch(self, request: Request, call_next) -> Response:
        request_id = request.headers.get(REQUEST_ID_HEADER) or uuid.uuid4().hex[:8]
        request.state.request_id = request_id
        route = f"{request.method} {request.url.path}"
        start = time.perf_counter()

        logger.info(
            f"-> {route}",
            extra={
                "request_id": request_id,
                "method": request.method,
                "path": request.url.path,
                "client_ip": request.client.host if request.client else "unknown",
            }
        )

        try:
            response = await call_next(request)
        except Exception as exc:
            logger.error(
                f"!! {route} raised {type(exc).__name__}",
                extra={"request_id": request_id, "duration_ms": _elapsed_ms(start), "error": str(exc)}
            )
            raise

        duration_ms = _elapsed_ms(start)
        response.headers[REQUEST_ID_HEADER] = request_id
        response.headers[TIMING_HEADER] = f"{duration_ms}ms"

        level = logging.WARNING if response.status_code >= 400 else logging.INFO
        logger.log(
            level,
            f"<- {route} {response.status_code} in {duration_ms}ms",
            extra={"request_id": request_id, "status_code": response.status_code, "duration_ms": duration_ms}
        )
        return response
