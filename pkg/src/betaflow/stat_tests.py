"""Goodness-of-fit and independence tests that turn distributional claims
into pass/fail :class:`TestReport` records.
"""
from dataclasses import dataclass
from typing import Optional, Union

import numba
import numpy as np
from scipy import stats

from .errors import UsageError

DEFAULT_ALPHA = 0.01
DCOV_MAX_N = 2000


@dataclass
class TestReport:
    """Outcome of one named check.

    ``passed`` is ``p_value >= threshold`` when a p-value is present (the
    threshold is then the significance level), else ``statistic <= threshold``.
    """

    __test__ = False  # not a pytest class

    name: str
    statistic: float
    p_value: Optional[float]
    threshold: float
    n: Union[int, tuple]
    seed: Optional[int]
    passed: bool

    @classmethod
    def from_p_value(cls, name, statistic, p_value, alpha, n, seed=None):
        return cls(name, float(statistic), float(p_value), float(alpha), n, seed,
                   bool(p_value >= alpha))

    @classmethod
    def from_bound(cls, name, statistic, threshold, n, seed=None):
        return cls(name, float(statistic), None, float(threshold), n, seed,
                   bool(statistic <= threshold))

    def to_dict(self):
        n = list(self.n) if isinstance(self.n, tuple) else self.n
        return {
            "name": self.name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "threshold": self.threshold,
            "n": n,
            "seed": self.seed,
            "pass": self.passed,
        }


def kolmogorov_sf(lam, terms=100):
    """P(K > lam) for the Kolmogorov distribution, 2 sum (-1)^(k-1) exp(-2 k^2 lam^2)."""
    if lam <= 0.0:
        return 1.0
    # the alternating series is useless for tiny lam, where the value is 1 anyway
    if lam < 0.2:
        return 1.0
    k = np.arange(1, terms + 1)
    total = 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k * k * lam * lam))
    return float(min(1.0, max(0.0, total)))


def ks_statistic(sample, cdf):
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_one_sample(sample, cdf, alpha=DEFAULT_ALPHA, name="ks_one_sample", seed=None):
    """One-sample KS test of ``sample`` against a vectorized CDF callable."""
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size == 0:
        raise UsageError("ks_one_sample needs a non-empty sample")
    d = ks_statistic(sample, cdf)
    p = kolmogorov_sf(np.sqrt(sample.size) * d)
    return TestReport.from_p_value(name, d, p, alpha, int(sample.size), seed)


def ks_two_sample_statistic(a, b):
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_two_sample(a, b, alpha=DEFAULT_ALPHA, name="ks_two_sample", seed=None):
    """Two-sample KS test with the asymptotic p-value at effective size nm/(n+m)."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise UsageError("ks_two_sample needs two non-empty samples")
    d = ks_two_sample_statistic(a, b)
    n_eff = a.size * b.size / (a.size + b.size)
    p = kolmogorov_sf(np.sqrt(n_eff) * d)
    return TestReport.from_p_value(name, d, p, alpha, (int(a.size), int(b.size)), seed)


# -- distance covariance ------------------------------------------------------


def _row_sums_1d(x):
    """a_i. = sum_j |x_i - x_j| in O(n log n)."""
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    n = x.size
    csum = np.cumsum(xs)
    i = np.arange(n)
    below = i * xs - (csum - xs)
    above = (csum[-1] - csum) - (n - 1 - i) * xs
    out = np.empty(n)
    out[order] = below + above
    return out


@numba.njit(cache=True, nogil=True)
def _pair_sum(x_sorted, y_in_xorder, yrank_in_xorder):
    """sum_{i<j} |x_i - x_j| |y_i - y_j| with Fenwick trees over y ranks.

    Points are visited in increasing x. For an earlier point j the term is
    (x_i - x_j)|y_i - y_j|, whose sign pattern splits on y_j < y_i.
    """
    n = x_sorted.size
    cnt = np.zeros(n + 1)
    sx = np.zeros(n + 1)
    sy = np.zeros(n + 1)
    sxy = np.zeros(n + 1)
    tot_c = 0.0
    tot_x = 0.0
    tot_y = 0.0
    tot_xy = 0.0
    total = 0.0
    for k in range(n):
        xi = x_sorted[k]
        yi = y_in_xorder[k]
        r = yrank_in_xorder[k]  # 1-based
        # prefix over ranks < r
        c = 0.0
        a = 0.0
        b = 0.0
        ab = 0.0
        j = r - 1
        while j > 0:
            c += cnt[j]
            a += sx[j]
            b += sy[j]
            ab += sxy[j]
            j -= j & (-j)
        lo = xi * yi * c - xi * b - yi * a + ab
        c2 = tot_c - c
        a2 = tot_x - a
        b2 = tot_y - b
        ab2 = tot_xy - ab
        hi = xi * yi * c2 - xi * b2 - yi * a2 + ab2
        total += lo - hi
        j = r
        while j <= n:
            cnt[j] += 1.0
            sx[j] += xi
            sy[j] += yi
            sxy[j] += xi * yi
            j += j & (-j)
        tot_c += 1.0
        tot_x += xi
        tot_y += yi
        tot_xy += xi * yi
    return total


class _DcovPrep:
    """Quantities of x reused across permutations of y."""

    def __init__(self, x, y):
        self.n = x.size
        self.order = np.argsort(x, kind="mergesort")
        self.x_sorted = np.ascontiguousarray(x[self.order])
        self.y = y
        self.y_rank = np.empty(self.n, dtype=np.int64)
        self.y_rank[np.argsort(y, kind="mergesort")] = np.arange(1, self.n + 1)
        self.a_row = _row_sums_1d(x)
        self.b_row = _row_sums_1d(y)
        self.a_tot = self.a_row.sum()
        self.b_tot = self.b_row.sum()

    def stat(self, perm=None):
        """V-statistic dCov^2 of (x, y[perm])."""
        idx = self.order if perm is None else perm[self.order]
        s = 2.0 * _pair_sum(self.x_sorted, np.ascontiguousarray(self.y[idx]),
                            np.ascontiguousarray(self.y_rank[idx]))
        b_row = self.b_row if perm is None else self.b_row[perm]
        n = float(self.n)
        return s / n**2 - 2.0 * np.dot(self.a_row, b_row) / n**3 + self.a_tot * self.b_tot / n**4


def dcov_statistic(x, y):
    """Biased (V-statistic) squared distance covariance of two 1-d samples."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise UsageError("dcov needs samples of equal length")
    return float(_DcovPrep(x, y).stat())


def dcov_statistic_dense(x, y):
    """Same statistic from double-centered distance matrices, O(n^2) memory."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    a = np.abs(x[:, None] - x[None, :])
    b = np.abs(y[:, None] - y[None, :])
    a = a - a.mean(axis=0) - a.mean(axis=1)[:, None] + a.mean()
    b = b - b.mean(axis=0) - b.mean(axis=1)[:, None] + b.mean()
    return float((a * b).mean())


def dcov_perm_test(x, y, n_perm, rng, alpha=DEFAULT_ALPHA, name="dcov_perm_test",
                   seed=None, max_n=DCOV_MAX_N):
    """Permutation test of independence based on distance covariance.

    Samples longer than ``max_n`` are subsampled (same rows from both) with
    ``rng``. The p-value is (1 + #{perm stat >= observed}) / (n_perm + 1).
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise UsageError("dcov_perm_test needs samples of equal length")
    if x.size < 100:
        raise UsageError("dcov_perm_test needs at least 100 points")
    if n_perm < 100:
        raise UsageError("dcov_perm_test needs at least 100 permutations")
    if x.size > max_n:
        rows = rng.generator.choice(x.size, size=max_n, replace=False)
        x, y = x[rows], y[rows]
    prep = _DcovPrep(x, y)
    observed = prep.stat()
    # relative slack so that permutations reproducing the observed pairing tie with it
    tol = 1e-12 * max(abs(observed), 1e-300)
    exceed = 0
    for _ in range(n_perm):
        if prep.stat(rng.permutation(x.size)) >= observed - tol:
            exceed += 1
    p = (1.0 + exceed) / (n_perm + 1.0)
    return TestReport.from_p_value(name, observed, p, alpha, int(x.size), seed)


# -- binned chi-square --------------------------------------------------------


def _quantile_bins(values, bins):
    edges = np.quantile(values, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    return np.searchsorted(edges, values, side="right")


def chi2_indep_grid(points, bins, alpha=DEFAULT_ALPHA, name="chi2_indep_grid", seed=None):
    """Chi-square test of mutual independence of three coordinates.

    Each axis is cut at its empirical quantiles into ``bins`` classes; observed
    cell counts are compared with the product of the marginal frequencies.
    Degrees of freedom: bins^3 - 3(bins - 1) - 1.
    """
    cols = [np.asarray(c, dtype=float).ravel() for c in points]
    if len(cols) != 3 or len({c.size for c in cols}) != 1:
        raise UsageError("chi2_indep_grid needs three coordinates of equal length")
    if bins < 2:
        raise UsageError("chi2_indep_grid needs bins >= 2")
    n = cols[0].size
    if n < 5 * bins**3:
        raise UsageError(f"chi2_indep_grid needs at least {5 * bins**3} points")
    idx = [_quantile_bins(c, bins) for c in cols]
    flat = (idx[0] * bins + idx[1]) * bins + idx[2]
    observed = np.bincount(flat, minlength=bins**3).reshape(bins, bins, bins).astype(float)
    m = [np.bincount(i, minlength=bins) / n for i in idx]
    expected = n * m[0][:, None, None] * m[1][None, :, None] * m[2][None, None, :]
    stat = float(np.sum((observed - expected) ** 2 / expected))
    df = bins**3 - 3 * (bins - 1) - 1
    p = float(stats.chi2.sf(stat, df))
    return TestReport.from_p_value(name, stat, p, alpha, int(n), seed)


def chi2_goodness_of_fit(observed, expected_prob, alpha=DEFAULT_ALPHA, min_expected=5.0,
                         name="chi2_gof", seed=None):
    """Pearson chi-square of cell counts against cell probabilities.

    Cells with expected count below ``min_expected`` are pooled into one cell;
    if that pool is itself too small it is merged into the smallest kept cell.
    """
    observed = np.asarray(observed, dtype=float).ravel()
    prob = np.asarray(expected_prob, dtype=float).ravel()
    if observed.shape != prob.shape:
        raise UsageError("observed counts and cell probabilities differ in length")
    n = observed.sum()
    expected = n * prob / prob.sum()
    small = expected < min_expected
    obs, exp = observed[~small], expected[~small]
    if obs.size < 2:
        raise UsageError("too few cells reach the minimum expected count")
    if small.any():
        pool_o, pool_e = observed[small].sum(), expected[small].sum()
        if pool_e >= min_expected:
            obs, exp = np.append(obs, pool_o), np.append(exp, pool_e)
        else:
            k = int(np.argmin(exp))
            obs, exp = obs.copy(), exp.copy()
            obs[k] += pool_o
            exp[k] += pool_e
    stat = float(np.sum((obs - exp) ** 2 / exp))
    df = obs.size - 1
    p = float(stats.chi2.sf(stat, df))
    return TestReport.from_p_value(name, stat, p, alpha, int(n), seed)


def seed_rule(name, reports, min_pass, seed=None):
    """Fold per-seed reports into one: at most len(reports) - min_pass may fail."""
    failures = sum(not r.passed for r in reports)
    n = len(reports)
    return TestReport.from_bound(name, failures, n - min_pass, n, seed)
