"""HTTP service exposing a pretrained Turkish masked LM to the simplification pipeline."""

from .app import create_app
from .model import MaskedLm

__all__ = ["create_app", "MaskedLm"]
