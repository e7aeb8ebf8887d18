"""The log-linear solution family of the six-function equation

    g1(y1) + g2(y2) + g3(y3) = g4(z1) + g5(z2) + g6(z3),   z = big_psi(y),

and a residual oracle that measures how far a candidate family is from
solving it on an interior grid of the unit cube.
"""
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Tuple

import numpy as np

from . import special
from .domain import is_scalar, require
from .transforms import big_psi


@dataclass(frozen=True)
class SolutionParams:
    """(alpha, beta, gamma, A1..A6); a family member needs A1+A2+A3 = A4+A5+A6."""

    alpha: float
    beta: float
    gamma: float
    A: Tuple[float, float, float, float, float, float] = (0.0,) * 6

    def __post_init__(self):
        if len(self.A) != 6:
            raise ValueError("A must hold six constants")
        object.__setattr__(self, "A", tuple(float(a) for a in self.A))

    @property
    def constraint_gap(self):
        a = self.A
        return (a[0] + a[1] + a[2]) - (a[3] + a[4] + a[5])

    def is_member(self, tol=1e-12):
        return abs(self.constraint_gap) <= tol

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "A": list(self.A)}


def g_eval(i, x, params):
    """Evaluate g_i of the family at x in (0, 1).

    i in {1, 4}: (alpha+gamma) ln x + (beta+gamma) ln(1-x) + A_i
    i in {2, 5}: alpha ln x + (beta+gamma) ln(1-x) + A_i
    i in {3, 6}: gamma ln x + beta ln(1-x) + A_i
    """
    if i not in range(1, 7):
        raise ValueError(f"g index must be in 1..6, got {i!r}")
    scalar = is_scalar(x)
    x = np.asarray(x, dtype=float)
    require((x > 0.0) & (x < 1.0), "g_eval needs x in (0, 1)")
    al, be, ga = params.alpha, params.beta, params.gamma
    if i in (1, 4):
        cx, c1 = al + ga, be + ga
    elif i in (2, 5):
        cx, c1 = al, be + ga
    else:
        cx, c1 = ga, be
    val = cx * np.log(x) + c1 * np.log1p(-x) + params.A[i - 1]
    return float(val) if scalar else val


def residual(y, params, overrides: Optional[Mapping[int, Callable]] = None):
    """LHS - RHS of the functional equation at y in (0,1)^3.

    ``overrides`` maps an index 1..6 to a callable that replaces that g_i,
    which is how non-family candidates are probed.
    """
    overrides = overrides or {}

    def g(i, x):
        if i in overrides:
            return overrides[i](x)
        return g_eval(i, x, params)

    scalar = is_scalar(*y)
    z = big_psi(y)
    lhs = g(1, y[0]) + g(2, y[1]) + g(3, y[2])
    rhs = g(4, z[0]) + g(5, z[1]) + g(6, z[2])
    val = np.asarray(lhs) - np.asarray(rhs)
    return float(val) if scalar else val


def interior_grid(k):
    """All points of {1/(k+1), ..., k/(k+1)}^3 as three flat arrays."""
    if k < 2:
        raise ValueError("grid size k must be at least 2")
    ticks = np.arange(1, k + 1) / (k + 1.0)
    g1, g2, g3 = np.meshgrid(ticks, ticks, ticks, indexing="ij")
    return g1.ravel(), g2.ravel(), g3.ravel()


def max_grid_residual(params, k, overrides=None):
    """sup |residual| over the interior k^3 grid."""
    return float(np.max(np.abs(residual(interior_grid(k), params, overrides))))


def params_from_shapes(p, q, r):
    """Family member whose g1, g2, g3 are the log-densities of B_I(p+r, q+r),
    B_I(p, q+r) and x times that of B_I(r, q); g4..g6 repeat them.
    """
    for name, v in (("p", p), ("q", q), ("r", r)):
        if not v > 0:
            raise ValueError(f"shape {name} must be positive, got {v!r}")
    a1 = -special.log_beta(p + r, q + r)
    a2 = -special.log_beta(p, q + r)
    a3 = 0.0 - special.log_beta(r, q)
    return SolutionParams(p - 1.0, q - 1.0, float(r), (a1, a2, a3, a1, a2, a3))
