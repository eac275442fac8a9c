from .logger import BaseLogger, CometLogger, RecordLogger

__all__ = [
    'BaseLogger', 'CometLogger', 'RecordLogger'
]
