"""Points, parameter bundles and membership predicates shared by every module.

Point types are NamedTuples so that each field may hold either a float or a
numpy array of equal-length coordinates; all maps and densities in the
package broadcast over them.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError


class UnitCube3(NamedTuple):
    y1: object
    y2: object
    y3: object


class HPoint(NamedTuple):
    x1: object
    x2: object
    x3: object


class Sym2(NamedTuple):
    """Symmetric 2x2 matrix [[x11, x12], [x12, x22]]."""

    x11: object
    x12: object
    x22: object


class TanTriple(NamedTuple):
    """(X_ii, Schur complement X_j.i, normalized off-diagonal V_i)."""

    diag: object
    schur: object
    v: object


class TriFactor(NamedTuple):
    """Upper triangular T = [[t11, t12], [0, t22]] with T'T = X."""

    t11: object
    t12: object
    t22: object


def _positive(name, value):
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class TriShapeParams:
    p: float
    q: float
    r: float

    def __post_init__(self):
        for name in ("p", "q", "r"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class GenMatrixParams:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class MatrixBetaParams:
    """Shapes of the 2x2 matrix beta law; both must exceed 1/2."""

    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0.5:
                raise DomainError(f"matrix beta needs {name} > 1/2, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class NeutralityParams:
    p: float
    q: float
    r: float
    s: float

    def __post_init__(self):
        for name in ("p", "q", "r", "s"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


def as_array(*values):
    return tuple(np.asarray(v, dtype=float) for v in values)


def in_unit_cube(y, margin=0.0):
    """Elementwise test of margin < y_i < 1 - margin for all three coordinates."""
    y1, y2, y3 = as_array(*y)
    ok = np.ones(np.broadcast(y1, y2, y3).shape, dtype=bool)
    for c in (y1, y2, y3):
        ok &= (c > margin) & (c < 1.0 - margin)
    return ok


def in_H(x, margin=0.0):
    """Elementwise membership in H: min{x1 x2, (1-x1)(1-x2)} > x3 > 0."""
    x1, x2, x3 = as_array(*x)
    with np.errstate(invalid="ignore"):
        return (
            (x3 > margin)
            & (x1 * x2 - x3 > margin)
            & ((1.0 - x1) * (1.0 - x2) - x3 > margin)
            & np.isfinite(x1)
            & np.isfinite(x2)
            & np.isfinite(x3)
        )


def in_D2(x, margin=0.0):
    """Elementwise membership in D_2 (x and e - x positive definite)."""
    x11, x12, x22 = as_array(*x)
    with np.errstate(invalid="ignore"):
        return (
            (x11 > margin)
            & (x11 < 1.0 - margin)
            & (x22 > margin)
            & (x22 < 1.0 - margin)
            & (x11 * x22 - x12 * x12 > margin)
            & ((1.0 - x11) * (1.0 - x22) - x12 * x12 > margin)
            & np.isfinite(x12)
        )


def require(mask, message):
    if not np.all(mask):
        raise DomainError(message)


def unwrap(value, scalar):
    """Return a Python float when the inputs were scalars."""
    return float(value) if scalar else value


def is_scalar(*values):
    return all(np.ndim(v) == 0 for v in values)
