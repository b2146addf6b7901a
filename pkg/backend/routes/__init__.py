"""API routers for the social inference backend."""

__all__ = ["system", "estimation", "complexity"]
