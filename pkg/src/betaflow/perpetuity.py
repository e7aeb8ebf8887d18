"""Iterated random functions for the three stochastic fixed-point equations

    R = A R + B           on (0, 1),   stationary law Y1
    S = C S + D           on (1, inf), stationary law 1/Y2
    T = a T + b + c / T   on (1, inf), candidate stationary law 1/Y3

whose coefficients are built from independent beta variables with the shapes
(p+r, q+r), (p, q+r), (r, q). Whether 1/Y3 is the only stationary law of the
third equation is open; the diagnostics here report distances and never
assert uniqueness.
"""
import enum
from typing import NamedTuple

import numba
import numpy as np

from .distributions import sample_theorem1_cube
from .domain import TriShapeParams
from .errors import DomainError
from .stat_tests import ks_two_sample_statistic


class EqKind(enum.Enum):
    AFFINE_R = "r"
    AFFINE_S = "s"
    MOBIUS_T = "t"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown equation {value!r}; expected r, s or t") from None


class AffineR(NamedTuple):
    A: object
    B: object


class AffineS(NamedTuple):
    C: object
    D: object


class MobiusT(NamedTuple):
    a: object
    b: object
    c: object


def coeffs_from_y(eq, y1, y2, y3):
    """Coefficients of the chosen equation from (Y1, Y2, Y3); unused coordinates are ignored.

    r: (A, B) = (-(1-Y2)Y3, Y2 + (1-Y2)Y3)
    s: (C, D) = ((1-Y1)Y3 / Y1, (1 - (1-Y1)Y3) / Y1)
    t: (a, b, c) = (Y2/Y1, (1 - 2Y2 + Y1Y2)/Y1, -(1-Y1)(1-Y2)/Y1)
    """
    eq = EqKind.parse(eq)
    if eq is EqKind.AFFINE_R:
        w = (1.0 - y2) * y3
        return AffineR(-w, y2 + w)
    if eq is EqKind.AFFINE_S:
        w = (1.0 - y1) * y3
        return AffineS(w / y1, (1.0 - w) / y1)
    return MobiusT(y2 / y1, (1.0 - 2.0 * y2 + y1 * y2) / y1, -(1.0 - y1) * (1.0 - y2) / y1)


def sample_coeffs(eq, rng, shapes, size=None):
    """Draw coefficients with (Y1, Y2, Y3) ~ B_I(p+r, q+r) x B_I(p, q+r) x B_I(r, q)."""
    if not isinstance(shapes, TriShapeParams):
        shapes = TriShapeParams(*shapes)
    y = sample_theorem1_cube(rng, shapes, size)
    return coeffs_from_y(eq, *y)


def target_sample(eq, rng, shapes, size):
    """Draws from the stationary law named for each equation: Y1, 1/Y2, 1/Y3."""
    eq = EqKind.parse(eq)
    if not isinstance(shapes, TriShapeParams):
        shapes = TriShapeParams(*shapes)
    y1, y2, y3 = sample_theorem1_cube(rng, shapes, size)
    if eq is EqKind.AFFINE_R:
        return y1
    if eq is EqKind.AFFINE_S:
        return 1.0 / y2
    return 1.0 / y3


def in_state_space(eq, state):
    eq = EqKind.parse(eq)
    state = np.asarray(state, dtype=float)
    if eq is EqKind.AFFINE_R:
        return (state > 0.0) & (state < 1.0)
    return (state > 1.0) & np.isfinite(state)


def _check_state(eq, state):
    if not np.all(in_state_space(eq, state)):
        space = "(0, 1)" if eq is EqKind.AFFINE_R else "(1, inf)"
        raise DomainError(f"state outside {space} for equation {eq.value}")


def step(eq, state, coeffs):
    """One application of the random map; state may be a scalar or an array."""
    eq = EqKind.parse(eq)
    _check_state(eq, state)
    if eq is EqKind.AFFINE_R:
        return coeffs.A * state + coeffs.B
    if eq is EqKind.AFFINE_S:
        return coeffs.C * state + coeffs.D
    return coeffs.a * state + coeffs.b + coeffs.c / state


@numba.njit(cache=True)
def _iterate_kernel(kind, c0, c1, c2, inits):
    n = c0.size
    out = np.empty((inits.size, n))
    for j in range(inits.size):
        state = inits[j]
        for k in range(n):
            if kind == 0:
                state = c0[k] * state + c1[k]
            else:
                # kind 1 passes c2 = 0, so one update covers both remaining maps
                state = c0[k] * state + c1[k] + c2[k] / state
            out[j, k] = state
    return out


def _iterate(eq, coeffs, inits):
    """Apply the maps in sequence to each initial state; returns (n_inits, n_steps)."""
    inits = np.ascontiguousarray(inits, dtype=float).ravel()
    c0 = np.ascontiguousarray(coeffs[0], dtype=float)
    c1 = np.ascontiguousarray(coeffs[1], dtype=float)
    if eq is EqKind.MOBIUS_T:
        c2 = np.ascontiguousarray(coeffs[2], dtype=float)
    else:
        c2 = np.zeros_like(c0)
    return _iterate_kernel(0 if eq is EqKind.AFFINE_R else 1, c0, c1, c2, inits)


def run_coupled(eq, rng, shapes, inits, n_burn, n_keep):
    """Chains from several initial states driven by the same coefficient draws.

    Returns an array of shape (len(inits), n_keep) of post-burn-in states.
    """
    eq = EqKind.parse(eq)
    inits = np.atleast_1d(np.asarray(inits, dtype=float))
    _check_state(eq, inits)
    if n_burn < 0 or n_keep < 1:
        raise ValueError("n_burn must be >= 0 and n_keep >= 1")
    coeffs = sample_coeffs(eq, rng, shapes, n_burn + n_keep)
    path = _iterate(eq, coeffs, inits)[:, n_burn:]
    if not np.all(in_state_space(eq, path)):
        raise DomainError(f"chain for equation {eq.value} left its state space")
    return path


def run_chain(eq, rng, shapes, n_burn=1000, n_keep=100_000, init=None):
    """Kept states of a single chain after ``n_burn`` burn-in steps."""
    eq = EqKind.parse(eq)
    if init is None:
        init = 0.5 if eq is EqKind.AFFINE_R else 2.0
    return run_coupled(eq, rng, shapes, [init], n_burn, n_keep)[0]


def two_start_diagnostic(eq, rng, shapes, inits, n_burn=1000, n_keep=100_000):
    """KS distance between two chains that share every coefficient draw."""
    if len(inits) != 2:
        raise ValueError("two_start_diagnostic needs exactly two initial states")
    path = run_coupled(eq, rng, shapes, inits, n_burn, n_keep)
    return ks_two_sample_statistic(path[0], path[1])
