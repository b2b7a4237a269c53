"""
Health check endpoint for monitoring and orchestration.
"""
from fastapi import APIRouter
from datetime import datetime, timezone
import platform

import numpy as np
import scipy

from hugkit.core.config import settings

router = APIRouter()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


@router.get("/live")
def liveness_check():
    """
    Liveness probe - indicates if the application is running.

    Returns:
        Simple alive status
    """
    return {
        "status": "alive",
        "timestamp": _now()
    }


@router.get("")
def health_status():
    """
    Health check with version and numerics information.

    Returns:
        Status, version, environment and library versions
    """
    response = {
        "status": "healthy",
        "timestamp": _now(),
        "version": settings.VERSION,
        "environment": settings.ENVIRONMENT,
        "numerics": {
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "parallel_energy": settings.ENERGY_PARALLEL
        }
    }

    # Add system info in non-production
    if settings.DEBUG:
        response["system"] = {
            "python_version": platform.python_version(),
            "platform": platform.system(),
            "architecture": platform.machine()
        }

    return response
