"""
NormScope - certified norm computations for the implicit norm, its l-norms and the GM bounds
FastAPI main application module
"""

import logging
import time

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.config import settings
from app.api import norm_api, tree_api, params_api, gm_api

logger = logging.getLogger(__name__)

# Create FastAPI application
app = FastAPI(
    title=settings.app_name,
    version=settings.version,
    description="Certified evaluation of the implicit norm, tree identities, parameter checks and GM bounds",
    debug=settings.debug
)


@app.middleware("http")
async def log_requests(request, call_next):
    start_time = time.time()
    response = await call_next(request)
    process_time = (time.time() - start_time) * 1000
    logger.info(f"{request.method} {request.url.path} -> {response.status_code} ({process_time:.2f}ms)")
    return response

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include API routers
app.include_router(norm_api.router, prefix="/api/norm", tags=["Norm"])
app.include_router(tree_api.router, prefix="/api/tree", tags=["Trees"])
app.include_router(params_api.router, prefix="/api/params", tags=["Parameters"])
app.include_router(gm_api.router, prefix="/api/gm", tags=["GM"])


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "app_name": settings.app_name,
        "version": settings.version,
        "precision_bits": settings.precision_bits
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug
    )
