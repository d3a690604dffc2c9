"""HTTP service wrapping the core package, plus its in-process client."""

from .client import ServiceClient, ServiceError

__all__ = ["ServiceClient", "ServiceError"]
