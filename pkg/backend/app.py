from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from backend.core.settings import get_settings
from backend.infrastructure.logging import configure_logging
from backend.routes import complexity, estimation, system


def create_app() -> FastAPI:
    settings = get_settings()
    configure_logging(settings)
    app = FastAPI(title="Social System Inference API", version="0.1.0")

    origins = [origin.strip() for origin in settings.api_cors_origins.split(",") if origin.strip()]
    if not origins:
        origins = ["http://localhost:3000", "http://127.0.0.1:3000"]

    app.add_middleware(
        CORSMiddleware,
        allow_origins=origins,
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    app.include_router(system.router, prefix="/api")
    app.include_router(estimation.router, prefix="/api")
    app.include_router(complexity.router, prefix="/api")

    @app.get("/", include_in_schema=False)
    async def root() -> JSONResponse:
        """Provide a lightweight landing page for container checks."""
        return JSONResponse(
            {
                "message": "Social System Inference API",
                "docs": "/docs",
            }
        )

    return app


app = create_app()
