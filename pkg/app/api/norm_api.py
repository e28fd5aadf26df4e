"""
Norm API endpoints
"""

import logging

from fastapi import APIRouter, HTTPException, Query

from app.models.norm_models import NormRequest, NormResult
from app.services.errors import NormScopeError
from app.services.run_service import run_service

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/test")
async def test_norm():
    """Test endpoint for norm evaluation"""
    return {"message": "Norm API is working", "status": "ok"}


@router.post("/evaluate", response_model=NormResult)
async def evaluate_norm(request: NormRequest):
    """Certified ||x||, with ||x||_l and |||x|||_r when requested"""
    try:
        return run_service.norm(request.vector, request.ell, request.r, request.precision_bits)
    except NormScopeError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/flat/{n}")
async def flat_norm(n: int, precision_bits: int = Query(128, ge=16, le=4096)):
    """||e_1 + ... + e_n|| = n / f(n)"""
    if n < 1 or n > 64:
        raise HTTPException(status_code=400, detail="n must lie in 1..64")
    literal = " ".join(f"{i}:1" for i in range(1, n + 1))
    return run_service.norm(literal, precision=precision_bits)
