"""Holevo-objective kernels: compiled extension when built, numpy otherwise.

``BACKEND`` names the implementation picked at import.  Both modules expose
``holevo_value``, ``holevo_values``, ``holevo_subgradient`` and
``smoothed_holevo`` with identical semantics; the compiled one handles
d <= 16 and defers larger problems to numpy.
"""
from . import _holevo_py as python_backend

try:
    from . import _holevo as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

BACKEND = "compiled" if compiled_backend is not None else "python"


def _pick(X):
    if compiled_backend is not None and X.shape[-2] <= compiled_backend.MAX_DIM:
        return compiled_backend
    return python_backend


def holevo_value(X):
    return _pick(X).holevo_value(X)


def holevo_values(Xs):
    return _pick(Xs).holevo_values(Xs)


def holevo_subgradient(X):
    return _pick(X).holevo_subgradient(X)


def smoothed_holevo(X, mu):
    return _pick(X).smoothed_holevo(X, mu)


__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "holevo_value",
    "holevo_values",
    "holevo_subgradient",
    "smoothed_holevo",
]
