"""
Tree API endpoints
"""

from fastapi import APIRouter, HTTPException

from app.models.norm_models import CommandReport, TreeRequest
from app.services.errors import NormScopeError
from app.services.run_service import run_service

router = APIRouter()


@router.get("/test")
async def test_tree():
    """Test endpoint for tree identities"""
    return {"message": "Tree API is working", "status": "ok"}


@router.post("/identities", response_model=CommandReport)
async def tree_identities(request: TreeRequest):
    """alpha/beta identities, certificates and level recombination for one tree or a rule"""
    if request.tree is None and request.ks is None:
        raise HTTPException(status_code=400, detail="give a tree literal or a branching stream")
    try:
        return run_service.tree_report(request.tree, request.ks, request.lengths, request.offset,
                                       request.precision_bits)
    except NormScopeError as e:
        raise HTTPException(status_code=400, detail=str(e))
