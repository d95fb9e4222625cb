"""HTTP service exposing the library operations."""

from .app import create_app

__all__ = ["create_app"]
