"""HTTP service wrapping the analysis package."""

from .app import app

__all__ = ["app"]
