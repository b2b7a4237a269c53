"""
Verification suite endpoint.
"""
from typing import Optional

from fastapi import APIRouter, HTTPException, status

from hugkit.schemas.verify import VerifyReport, VerifySuite
from hugkit.services.verify_service import verify

router = APIRouter()


@router.post("/{suite}", response_model=VerifyReport)
def run_suite(suite: str, seed: Optional[int] = None):
    """
    Run a verification suite and return its report.

    A failing suite still answers 200; check `passed`.
    """
    try:
        selected = VerifySuite(suite)
    except ValueError:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Unknown suite '{suite}'"
        )
    return verify(selected, seed=seed)
