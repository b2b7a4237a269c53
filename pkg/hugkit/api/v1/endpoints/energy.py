"""
Energy minimization and evaluation endpoints.
"""
from fastapi import APIRouter

from hugkit.core.logging_config import get_logger
from hugkit.models.geometry import PointConfig
from hugkit.schemas.energy import (
    EvaluateRequest,
    EvaluateResponse,
    OptimizeRequest,
    OptimizeResponse,
)
from hugkit.services.energy_service import (
    COINCIDENT_TOL,
    average_energy,
    log_det_gram,
    log_energy,
    riesz_energy,
    separation,
)
from hugkit.services.optim_service import default_energy_config, minimize_energy

router = APIRouter()
logger = get_logger(__name__)


@router.post("/optimize", response_model=OptimizeResponse)
def optimize(request: OptimizeRequest):
    """
    Minimize the Riesz s-energy of n points on the sphere in R^d.

    Runs `restarts` projected gradient descents and returns the best
    configuration.
    """
    cfg = default_energy_config(seed=request.seed, restarts=request.restarts)
    minimum = minimize_energy(request.n, request.d, request.s, cfg)
    return OptimizeResponse(
        n=request.n,
        d=request.d,
        s=request.s,
        energy=minimum.energy,
        average_energy=minimum.energy / (request.n * (request.n - 1)),
        restart=minimum.restart,
        energies=minimum.energies,
        points=minimum.config.points.tolist(),
    )


@router.post("/evaluate", response_model=EvaluateResponse)
def evaluate(request: EvaluateRequest):
    """
    Energies and separation of a given configuration.

    Raises:
        InvalidInputError: If the points are not unit vectors (400)
        CoincidentPointsError: For coincident points and s > 0 (422)
    """
    config = PointConfig(points=request.points)
    sep, pair = separation(config)
    return EvaluateResponse(
        riesz_energy=riesz_energy(config, request.s),
        average_energy=average_energy(config, request.s),
        log_energy=log_energy(config) if sep >= COINCIDENT_TOL else None,
        log_det_gram=log_det_gram(config, request.epsilon) if request.epsilon else None,
        separation=sep,
        separation_pair=list(pair),
    )
