"""HTTP service exposing the verification engine (FastAPI)."""

from .app import app

__all__ = ["app"]
