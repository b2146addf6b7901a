"""Log sinks for the CLI and the API."""
from __future__ import annotations

import sys

from loguru import logger

from backend.core.settings import Settings, get_settings

_configured = False


def configure_logging(settings: Settings | None = None, *, force: bool = False) -> None:
    """Stderr sink at the configured level plus a JSON-lines audit file."""
    global _configured
    if _configured and not force:
        return
    settings = settings or get_settings()
    logger.remove()
    logger.add(sys.stderr, level=settings.log_level.upper())
    settings.logs_root.mkdir(parents=True, exist_ok=True)
    logger.add(
        settings.logs_root / "socinfer.log",
        level="INFO",
        serialize=True,
        rotation="10 MB",
        enqueue=False,
    )
    _configured = True
