"""
Parameter system API endpoints
"""

import logging

from fastapi import APIRouter, HTTPException

from app.models.norm_models import CommandReport
from app.models.parameter_models import SystemConfig
from app.services.errors import NormScopeError
from app.services.run_service import run_service

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/test")
async def test_params():
    """Test endpoint for parameter checks"""
    return {"message": "Parameters API is working", "status": "ok"}


@router.get("/presets")
async def list_presets():
    """Built-in parameter systems"""
    return {
        "toy": SystemConfig.toy().model_dump(),
        "honest": SystemConfig.honest().model_dump()
    }


@router.post("/check", response_model=CommandReport)
async def check_system(config: SystemConfig):
    """Run every growth, budget, J and sigma check on a system"""
    try:
        return run_service.params_report(config)
    except NormScopeError as e:
        logger.error(f"parameter check failed: {e}")
        raise HTTPException(status_code=400, detail=str(e))
