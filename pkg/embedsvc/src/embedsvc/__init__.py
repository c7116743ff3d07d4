"""embedsvc: the embedding service behind cupcleaner's ``service`` provider."""

from .app import create_app
from .backends import BackendLoadError, HashBackend
from .config import CHANNELS, ChannelConfig, ServiceConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "BackendLoadError",
    "CHANNELS",
    "ChannelConfig",
    "HashBackend",
    "ServiceConfig",
    "create_app",
    "load_config",
    "__version__",
]
