"""Samplers and log-densities: B_I, B_II, Dirichlet D(p, r, q), the trivariate
law B(p, q, r) on H, the 2x2 matrix beta and the generalized 2x2 family.

Samplers take an :class:`~betaflow.rng.RngStream` and an optional ``size``;
with ``size=None`` a single draw comes back as floats, otherwise each
coordinate is an array of length ``size``. Log-densities broadcast over
arrays and raise :class:`DomainError` if any point lies outside the support.
"""
import math

import numpy as np

from . import special
from .domain import (
    GenMatrixParams,
    HPoint,
    MatrixBetaParams,
    Sym2,
    TanTriple,
    TriShapeParams,
    UnitCube3,
    as_array,
    in_D2,
    in_H,
    is_scalar,
    require,
    unwrap,
)
from .errors import DomainError
from .rng import beta_variates, log_gamma_variates
from .transforms import psi_inv, tan_triple_inv


def _shape(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"shape {name} must be positive, got {value!r}")
    return value


def _count(size):
    return 1 if size is None else int(size)


def _out(values, size):
    return float(values[0]) if size is None else values


# -- univariate beta, first and second kind ---------------------------------


def sample_beta(rng, a, b, size=None):
    """Draw from B_I(a, b); values are strictly inside (0, 1)."""
    a, b = _shape("a", a), _shape("b", b)
    return _out(beta_variates(rng, a, b, _count(size)), size)


def beta_logpdf(x, a, b):
    a, b = _shape("a", a), _shape("b", b)
    scalar = is_scalar(x)
    x = np.asarray(x, dtype=float)
    require((x > 0.0) & (x < 1.0), "beta_logpdf needs x in (0, 1)")
    val = (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) - special.log_beta(a, b)
    return unwrap(val, scalar)


def beta_cdf(x, a, b):
    return special.reg_inc_beta(np.clip(x, 0.0, 1.0), a, b)


def beta2_logpdf(x, alpha, beta):
    """Log-density of the beta law of the second kind, B_II(alpha, beta), on (0, inf).

    x^(alpha-1) (1+x)^(-alpha-beta) / B(alpha, beta)
    """
    alpha, beta = _shape("alpha", alpha), _shape("beta", beta)
    scalar = is_scalar(x)
    x = np.asarray(x, dtype=float)
    require((x > 0.0) & np.isfinite(x), "beta2_logpdf needs x > 0")
    val = (alpha - 1.0) * np.log(x) - (alpha + beta) * np.log1p(x) - special.log_beta(alpha, beta)
    return unwrap(val, scalar)


def beta2_cdf(x, alpha, beta):
    """CDF of B_II(alpha, beta): I_{x/(1+x)}(alpha, beta)."""
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    with np.errstate(invalid="ignore"):
        t = np.where(np.isinf(x), 1.0, x / (1.0 + x))
    return special.reg_inc_beta(t if t.ndim else float(t), alpha, beta)


def sample_beta2(rng, alpha, beta, size=None):
    """Draw from B_II(alpha, beta) as U / (1 - U), U ~ B_I(alpha, beta)."""
    alpha, beta = _shape("alpha", alpha), _shape("beta", beta)
    n = _count(size)
    out = np.empty(n)
    todo = np.arange(n)
    while todo.size:
        u = beta_variates(rng, alpha, beta, todo.size)
        x = u / (1.0 - u)
        out[todo] = x
        todo = todo[~((x > 0.0) & np.isfinite(x))]
    return _out(out, size)


def sample_dirichlet3(rng, p, r, q, size=None):
    """Draw (w1, w2, w3) from the Dirichlet law D(p, r, q) on the open simplex."""
    shapes = [_shape("p", p), _shape("r", r), _shape("q", q)]
    n = _count(size)
    out = np.empty((n, 3))
    todo = np.arange(n)
    while todo.size:
        m = todo.size
        logs = np.column_stack([log_gamma_variates(rng, s, m) for s in shapes])
        logs -= logs.max(axis=1, keepdims=True)
        w = np.exp(logs)
        w /= w.sum(axis=1, keepdims=True)
        out[todo] = w
        todo = todo[~np.all((w > 0.0) & (w < 1.0), axis=1)]
    if size is None:
        return tuple(float(v) for v in out[0])
    return out[:, 0], out[:, 1], out[:, 2]


# -- B(p, q, r) on H ---------------------------------------------------------


def trivariate_H_log_const(params):
    """ln of the normalizer 1 / (B(p+r, q+r) B(p, q+r) B(r, q))."""
    p, q, r = params.p, params.q, params.r
    return -(special.log_beta(p + r, q + r) + special.log_beta(p, q + r) + special.log_beta(r, q))


def trivariate_H_logpdf(x, params):
    """Log-density of B(p, q, r) at a point of H.

    (p-1) ln(x1 x2 - x3) + (q-1) ln((1-x1)(1-x2) - x3) + (r-1) ln x3 + normalizer
    """
    if not isinstance(params, TriShapeParams):
        params = TriShapeParams(*params)
    scalar = is_scalar(*x)
    x1, x2, x3 = as_array(*x)
    require(in_H((x1, x2, x3)), "point is not inside H")
    p, q, r = params.p, params.q, params.r
    val = (
        (p - 1.0) * np.log(x1 * x2 - x3)
        + (q - 1.0) * np.log((1.0 - x1) * (1.0 - x2) - x3)
        + (r - 1.0) * np.log(x3)
        + trivariate_H_log_const(params)
    )
    return unwrap(val, scalar)


def sample_theorem1_cube(rng, params, size=None):
    """(Y1, Y2, Y3) ~ B_I(p+r, q+r) x B_I(p, q+r) x B_I(r, q)."""
    if not isinstance(params, TriShapeParams):
        params = TriShapeParams(*params)
    p, q, r = params.p, params.q, params.r
    n = _count(size)
    y1 = beta_variates(rng, p + r, q + r, n)
    y2 = beta_variates(rng, p, q + r, n)
    y3 = beta_variates(rng, r, q, n)
    if size is None:
        return UnitCube3(float(y1[0]), float(y2[0]), float(y3[0]))
    return UnitCube3(y1, y2, y3)


def sample_trivariate_H(rng, params, size=None):
    """Draw from B(p, q, r) as psi_1^{-1} of a product-beta draw."""
    if not isinstance(params, TriShapeParams):
        params = TriShapeParams(*params)
    n = _count(size)
    cols = np.empty((3, n))
    todo = np.arange(n)
    while todo.size:
        y = sample_theorem1_cube(rng, params, todo.size)
        x = np.array(psi_inv(1, y, check=False))
        cols[:, todo] = x
        todo = todo[~in_H(tuple(x))]
    if size is None:
        return HPoint(*(float(c[0]) for c in cols))
    return HPoint(cols[0], cols[1], cols[2])


# -- 2x2 matrix laws ---------------------------------------------------------


def _logdets(x11, x12, x22):
    sq = x12 * x12
    return np.log(x11 * x22 - sq), np.log((1.0 - x11) * (1.0 - x22) - sq)


def matrix_beta2_logpdf(x, params):
    """Log-density of beta_2(p, q): (det x)^(p-3/2) (det(e-x))^(q-3/2) / B_2(p, q)."""
    if not isinstance(params, MatrixBetaParams):
        params = MatrixBetaParams(*params)
    scalar = is_scalar(*x)
    x11, x12, x22 = as_array(*x)
    require(in_D2((x11, x12, x22)), "matrix is not inside D_2")
    ld, lde = _logdets(x11, x12, x22)
    val = (
        (params.p - 1.5) * ld
        + (params.q - 1.5) * lde
        - special.log_matrix_beta_const(2, params.p, params.q)
    )
    return unwrap(val, scalar)


def gen_matrix_log_const(params):
    """ln B(a, b) + ln B(a+b, c) + ln B(a+c, b+c)."""
    a, b, c = params.a, params.b, params.c
    return special.log_beta(a, b) + special.log_beta(a + b, c) + special.log_beta(a + c, b + c)


def gen_matrix_logpdf(x, params):
    """Log-density of the generalized 2x2 family with shapes (a, b, c).

    (det x)^(a-1) (det(e-x))^(b-1) |x12|^(2c-1) / (B(a,b) B(a+b,c) B(a+c,b+c)).
    At x12 = 0 with c != 1/2 the value is +inf (c < 1/2) or -inf (c > 1/2).
    """
    if not isinstance(params, GenMatrixParams):
        params = GenMatrixParams(*params)
    scalar = is_scalar(*x)
    x11, x12, x22 = as_array(*x)
    require(in_D2((x11, x12, x22)), "matrix is not inside D_2")
    ld, lde = _logdets(x11, x12, x22)
    k = 2.0 * params.c - 1.0
    if k == 0.0:
        off = np.zeros_like(ld)
    else:
        with np.errstate(divide="ignore"):
            off = k * np.log(np.abs(x12))
    val = (params.a - 1.0) * ld + (params.b - 1.0) * lde + off - gen_matrix_log_const(params)
    return unwrap(val, scalar)


def _signed_sqrt_beta(rng, a, b, n):
    """V = +-sqrt(U), U ~ B_I(a, b), with an independent fair sign."""
    u = beta_variates(rng, a, b, n)
    return rng.signs(n) * np.sqrt(u)


def sample_matrix_beta2(rng, params, size=None):
    """Draw from beta_2(p, q) through its triangular factor T with T'T = X.

    t11^2 ~ B_I(p, q), t22^2 ~ B_I(p - 1/2, q), v = +-sqrt(B_I(1/2, q - 1/2)),
    t12 = sqrt(1 - t11^2) sqrt(1 - t22^2) v.
    """
    if not isinstance(params, MatrixBetaParams):
        params = MatrixBetaParams(*params)
    p, q = params.p, params.q
    n = _count(size)
    cols = np.empty((3, n))
    todo = np.arange(n)
    while todo.size:
        m = todo.size
        t11sq = beta_variates(rng, p, q, m)
        t22sq = beta_variates(rng, p - 0.5, q, m)
        v = _signed_sqrt_beta(rng, 0.5, q - 0.5, m)
        t12 = np.sqrt((1.0 - t11sq) * (1.0 - t22sq)) * v
        x = np.array([t11sq, np.sqrt(t11sq) * t12, t12 * t12 + t22sq])
        cols[:, todo] = x
        todo = todo[~in_D2(tuple(x))]
    if size is None:
        return Sym2(*(float(c[0]) for c in cols))
    return Sym2(cols[0], cols[1], cols[2])


def sample_gen_matrix(rng, params, size=None):
    """Draw from the generalized family by inverting an independent Tan triple.

    X11 ~ B_I(a+c, b+c), X2.1 ~ B_I(a, b+c), V1 = +-sqrt(B_I(c, b)).
    """
    if not isinstance(params, GenMatrixParams):
        params = GenMatrixParams(*params)
    a, b, c = params.a, params.b, params.c
    n = _count(size)
    cols = np.empty((3, n))
    todo = np.arange(n)
    while todo.size:
        m = todo.size
        diag = beta_variates(rng, a + c, b + c, m)
        schur = beta_variates(rng, a, b + c, m)
        v = _signed_sqrt_beta(rng, c, b, m)
        x = np.array(tan_triple_inv(1, TanTriple(diag, schur, v), check=False))
        cols[:, todo] = x
        todo = todo[~in_D2(tuple(x))]
    if size is None:
        return Sym2(*(float(c[0]) for c in cols))
    return Sym2(cols[0], cols[1], cols[2])
