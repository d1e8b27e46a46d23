"""HTTP inference microservice for three-class textual entailment."""

from .app import create_app
from .config import ServiceConfig

__version__ = "0.1.0"

__all__ = ["ServiceConfig", "create_app"]
