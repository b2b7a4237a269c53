"""
GNC diagnostics endpoint.
"""
from typing import Any, Dict

from fastapi import APIRouter, Body

from hugkit.schemas.gnc import GncReport
from hugkit.services.gnc_service import gnc_report
from hugkit.services.persistence_service import state_from_mapping

router = APIRouter()


@router.post("", response_model=GncReport)
def diagnose(document: Dict[str, Any] = Body(...)):
    """
    Full GNC report of a labeled state.

    The body is a state document as written by save_state.
    """
    state, _ = state_from_mapping(document)
    return gnc_report(state.features, state.labels, state.proxies)
