from . import errors, liouville
from .settings import settings

__all__ = [
    'errors', 'liouville', 'settings'
]
