"""
GM norm API endpoints
"""

from fractions import Fraction

from fastapi import APIRouter, HTTPException

from app.models.norm_models import GMRequest, SpreadingRequest
from app.models.parameter_models import SystemConfig
from app.services.errors import NormScopeError
from app.services.gm_space import sandwich_report, spreading_gap
from app.services.parameters import ParameterSystem
from app.services.run_service import jsonable
from app.services.vectors import FiniteVector

router = APIRouter()


def _system(config, surrogate: bool) -> ParameterSystem:
    config = config or SystemConfig.toy()
    if surrogate:
        config = config.model_copy(update={"lacunary": "surrogate"})
    return ParameterSystem(config)


@router.get("/test")
async def test_gm():
    """Test endpoint for GM bounds"""
    return {"message": "GM API is working", "status": "ok"}


@router.post("/sandwich")
async def gm_sandwich(request: GMRequest):
    """Lower and upper bounds for ||x||_GM"""
    try:
        x = FiniteVector.parse(request.vector)
        system = _system(request.system, request.surrogate)
        return jsonable(sandwich_report(x, system, request.depth, request.budget))
    except NormScopeError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.post("/spreading")
async def gm_spreading(request: SpreadingRequest):
    """Analytic spreading gap and the measured sandwich width over N"""
    try:
        lambdas = [Fraction(v) for v in request.lambdas]
        system = _system(None, request.surrogate)
        return {"rows": [jsonable(spreading_gap(lambdas, N, system)) for N in request.N_grid]}
    except (NormScopeError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
