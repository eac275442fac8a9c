from contextlib import ContextDecorator
from contextvars import ContextVar
from types import MappingProxyType

from kik.errors import ConfigError


_DEFAULTS = {
    "hermitian_tol": 1e-10,
    "trace_tol": 1e-10,
    "imag_tol": 1e-8,
    "magnus_tol": 1e-10,
    "magnus_nodes": 16,
    "magnus_max_nodes": 1024,
    "cond_limit": 1e12,
    "ptm_cond_limit": 1e10,
    "readout_cond_limit": 1e8,
}


class _Override(ContextDecorator):
    def __init__(self, owner, overrides):
        self._owner = owner
        self._overrides = overrides
        self._tokens = []

    def _recreate_cm(self):
        # one instance per decorated call, so concurrent calls never share tokens
        return _Override(self._owner, self._overrides)

    def __enter__(self):
        values = self._owner._values
        self._tokens.append(values.set(MappingProxyType({**values.get(), **self._overrides})))
        return self._owner

    def __exit__(self, exc_type, exc_value, exc_traceback):
        self._owner._values.reset(self._tokens.pop())
        return False


class NumericSettings:
    """
    Repo-wide numerical tolerances.

    Read as attributes (``settings.hermitian_tol``); override for a block or
    a function with ``settings(...)``::

        with settings(hermitian_tol=1e-8):
            ...

    Overrides live in a context variable, so they are local to the thread
    (or task) that entered them.
    """
    def __init__(self):
        self._values = ContextVar("kik_numeric_settings", default=MappingProxyType(dict(_DEFAULTS)))

    def __getattr__(self, name):
        if "_values" in self.__dict__:
            values = self.__dict__["_values"].get()
            if name in values:
                return values[name]
        raise AttributeError(name)

    def as_dict(self):
        return dict(self._values.get())

    def reset(self):
        self._values.set(MappingProxyType(dict(_DEFAULTS)))

    def __call__(self, **overrides):
        unknown = set(overrides) - set(_DEFAULTS)
        if unknown:
            raise ConfigError("unknown numerical settings: {}".format(sorted(unknown)))
        return _Override(self, overrides)


settings = NumericSettings()


def resolve(tol, name):
    """Per-call tolerance if given, repo default otherwise."""
    return getattr(settings, name) if tol is None else tol
