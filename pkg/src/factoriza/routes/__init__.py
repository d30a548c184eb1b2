"""
factoriza report API routes
"""

from src.factoriza.routes.api import api_bp

__all__ = ["api_bp"]
