"""Deterministic maps between H, the unit cube and D_2.

All maps broadcast over numpy arrays held in the point NamedTuples. Public
entry points reject inputs within ``BOUNDARY`` of the domain boundary, because
the maps amplify roundoff there. Pass ``check=False`` to skip validation when
the caller already guarantees membership (samplers, grid oracles).
"""
from typing import NamedTuple

import numpy as np

from .domain import (
    HPoint,
    Sym2,
    TanTriple,
    TriFactor,
    UnitCube3,
    as_array,
    in_D2,
    in_H,
    in_unit_cube,
    is_scalar,
    require,
)
from .errors import DomainError

BOUNDARY = 1e-12


class DirichletRep(NamedTuple):
    u: object
    v1: object
    v2: object


def _wrap(cls, values, scalar):
    if scalar:
        return cls(*(float(v) for v in values))
    return cls(*values)


def _index(i):
    if i not in (1, 2):
        raise DomainError(f"map index must be 1 or 2, got {i!r}")
    return i


def _check_cube(y, check):
    if check:
        require(in_unit_cube(y, BOUNDARY), "point is not inside (0, 1)^3")


def psi(i, x, check=True):
    """psi_i: H -> (0,1)^3, (x_i, (x1 x2 - x3)/x_i, x3 / ((1-x_i)(x_i - x1 x2 + x3)))."""
    _index(i)
    scalar = is_scalar(*x)
    x1, x2, x3 = as_array(*x)
    if check:
        require(in_H((x1, x2, x3), BOUNDARY), "point is not inside H")
    xi, xj = (x1, x2) if i == 1 else (x2, x1)
    # x_j - x3/x_i and x_i(1-x_j) + x3 avoid cancelling against the product x1 x2
    y2 = xj - x3 / xi
    y3 = x3 / ((1.0 - xi) * (xi * (1.0 - xj) + x3))
    return _wrap(UnitCube3, (xi + 0.0 * y2, y2, y3), scalar)


def psi_inv(i, y, check=True):
    """Inverse of psi_i.

    For i = 1: x1 = y1, x2 = y2 + (1-y1)(1-y2)y3, x3 = y1(1-y1)(1-y2)y3.
    For i = 2 the roles of x1 and x2 are exchanged.
    """
    _index(i)
    scalar = is_scalar(*y)
    y1, y2, y3 = as_array(*y)
    _check_cube((y1, y2, y3), check)
    w = (1.0 - y1) * (1.0 - y2) * y3
    other = y2 + w
    x3 = y1 * w
    if i == 1:
        return _wrap(HPoint, (y1 + 0.0 * other, other, x3), scalar)
    return _wrap(HPoint, (other, y1 + 0.0 * other, x3), scalar)


def big_psi(y, check=True):
    """The involution psi_2 o psi_1^{-1} of (0,1)^3 in closed form."""
    scalar = is_scalar(*y)
    y1, y2, y3 = as_array(*y)
    _check_cube((y1, y2, y3), check)
    z1 = y2 + (1.0 - y1) * (1.0 - y2) * y3
    z2 = y1 * y2 / z1
    z3 = y1 * y3 / ((1.0 - (1.0 - y1) * y3) * (y2 + y3 * (1.0 - y2)))
    return _wrap(UnitCube3, (z1, z2, z3), scalar)


def big_psi_composed(y, check=True):
    """Same involution evaluated as psi_2(psi_1^{-1}(y)); a regression oracle."""
    return psi(2, psi_inv(1, y, check=check), check=False)


def psi_jacobian(i, x, check=True):
    """|det D psi_i(x)| = 1 / ((1 - x_i)(x_i - x1 x2 + x3))."""
    _index(i)
    scalar = is_scalar(*x)
    x1, x2, x3 = as_array(*x)
    if check:
        require(in_H((x1, x2, x3), BOUNDARY), "point is not inside H")
    xi = x1 if i == 1 else x2
    jac = 1.0 / ((1.0 - xi) * (xi - x1 * x2 + x3))
    return float(jac) if scalar else jac


def numerical_psi_jacobian(i, x, rel_step=1e-6):
    """|det| of the central-difference Jacobian of psi_i at a single point.

    Step per coordinate is rel_step * max(1, |x_k|).
    """
    base = np.array([float(v) for v in x])
    cols = []
    for k in range(3):
        h = rel_step * max(1.0, abs(base[k]))
        up = base.copy()
        dn = base.copy()
        up[k] += h
        dn[k] -= h
        f_up = np.array(psi(i, HPoint(*up), check=False))
        f_dn = np.array(psi(i, HPoint(*dn), check=False))
        cols.append((f_up - f_dn) / (2.0 * h))
    return abs(float(np.linalg.det(np.column_stack(cols))))


def tan_triple(i, x, check=True):
    """(X_ii, X_jj - X_12^2 / X_ii, X_12 / sqrt((1 - X_ii)(X_ii - det X))) for i = 1, 2."""
    _index(i)
    scalar = is_scalar(*x)
    x11, x12, x22 = as_array(*x)
    if check:
        require(in_D2((x11, x12, x22), BOUNDARY), "matrix is not inside D_2")
    xi, xj = (x11, x22) if i == 1 else (x22, x11)
    sq = x12 * x12
    schur = xj - sq / xi
    v = x12 / np.sqrt((1.0 - xi) * (xi - x11 * x22 + sq))
    return _wrap(TanTriple, (xi, schur, v), scalar)


def tan_triple_inv(i, t, check=True):
    """Rebuild the matrix from its Tan triple; the sign of v is carried onto x12.

    With u = v^2 diag (1 - diag)(1 - schur): x12 = sign(v) sqrt(u) and the
    other diagonal entry is schur + u / diag.
    """
    _index(i)
    scalar = is_scalar(*t)
    diag, schur, v = as_array(*t)
    if check:
        ok = (
            (diag > BOUNDARY) & (diag < 1.0 - BOUNDARY)
            & (schur > BOUNDARY) & (schur < 1.0 - BOUNDARY)
            & (v > -1.0 + BOUNDARY) & (v < 1.0 - BOUNDARY)
        )
        require(ok, "Tan triple outside (0,1) x (0,1) x (-1,1)")
    x12 = v * np.sqrt(diag * (1.0 - diag) * (1.0 - schur))
    other = schur + x12 * x12 / diag
    if i == 1:
        return _wrap(Sym2, (diag, x12, other), scalar)
    return _wrap(Sym2, (other, x12, diag), scalar)


def kshirsagar_decompose(x, check=True):
    """Upper triangular T with T'T = x: t11 = sqrt(x11), t12 = x12/t11, t22 = sqrt(x2.1)."""
    scalar = is_scalar(*x)
    x11, x12, x22 = as_array(*x)
    if check:
        require(in_D2((x11, x12, x22), BOUNDARY), "matrix is not inside D_2")
    t11 = np.sqrt(x11)
    t12 = x12 / t11
    t22 = np.sqrt(x22 - x12 * x12 / x11)
    return _wrap(TriFactor, (t11, t12, t22), scalar)


def kshirsagar_compose(t):
    """T'T for T = [[t11, t12], [0, t22]]."""
    scalar = is_scalar(*t)
    t11, t12, t22 = as_array(*t)
    return _wrap(Sym2, (t11 * t11, t11 * t12, t12 * t12 + t22 * t22), scalar)


def neutrality_map(y, check=True):
    """The complete-neutrality map of the unit cube.

    (y1 / (1 - (1-y1)(y2 + (1-y2)y3)), (1-y1)y2 / (1 - (1-y1)(1-y2)y3), (1-y1)(1-y2)y3)
    """
    scalar = is_scalar(*y)
    y1, y2, y3 = as_array(*y)
    _check_cube((y1, y2, y3), check)
    z1 = y1 / (1.0 - (1.0 - y1) * (y2 + (1.0 - y2) * y3))
    z3 = (1.0 - y1) * (1.0 - y2) * y3
    z2 = (1.0 - y1) * y2 / (1.0 - z3)
    return _wrap(UnitCube3, (z1, z2, z3), scalar)


def dirichlet_rep(y, check=True):
    """(U, V1, V2) with U = y1 / (y2 + (1-y1)(1-y2)y3), V1 = y2, V2 = (1-y1)y3 / (1 - (1-y1)y3).

    U * (V1, V2) is the last two coordinates of big_psi(y) rescaled into a
    Dirichlet pair; see ``dirichlet_rep_to_psi``.
    """
    scalar = is_scalar(*y)
    y1, y2, y3 = as_array(*y)
    _check_cube((y1, y2, y3), check)
    u = y1 / (y2 + (1.0 - y1) * (1.0 - y2) * y3)
    w = (1.0 - y1) * y3
    v2 = w / (1.0 - w)
    return _wrap(DirichletRep, (u, y2 + 0.0 * u, v2), scalar)


def dirichlet_rep_to_psi(rep):
    """((V1 + V2)/(1 + V2), U V1, U V2 / (1 - U V1)); equals big_psi of the source point."""
    scalar = is_scalar(*rep)
    u, v1, v2 = as_array(*rep)
    uv1 = u * v1
    z = ((v1 + v2) / (1.0 + v2), uv1, u * v2 / (1.0 - uv1))
    return _wrap(UnitCube3, z, scalar)
