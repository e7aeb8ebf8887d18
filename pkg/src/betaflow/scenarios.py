"""Named verification scenarios, each a fixed set of TestReports.

Stochastic checks run once per seed and are folded with the seed-majority
rule (at least ``min_pass`` of the seeds must pass at level ``alpha``).
Deterministic checks (identities, residuals, MC normalizations) give one
report compared with a fixed bound.
"""
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import distributions as dist
from . import perpetuity as perp
from . import transforms as tr
from .domain import (
    GenMatrixParams,
    MatrixBetaParams,
    NeutralityParams,
    TriShapeParams,
    UnitCube3,
    in_D2,
)
from .funceq import SolutionParams, max_grid_residual, params_from_shapes
from .rng import RngStream, beta_variates
from .stat_tests import (
    TestReport,
    chi2_indep_grid,
    dcov_perm_test,
    ks_one_sample,
    ks_two_sample,
    ks_two_sample_statistic,
    seed_rule,
)

SCENARIOS = (
    "theorem1",
    "theorem1-independence",
    "matrix-beta",
    "gen-matrix",
    "kshirsagar",
    "neutrality",
    "dirichlet-rep",
    "funceq-family",
    "perpetuity-r",
    "perpetuity-s",
    "perpetuity-t",
)

DEFAULT_PARAMS = {
    "theorem1": {"p": 2.0, "q": 1.5, "r": 1.0},
    "theorem1-independence": {"p": 2.0, "q": 1.5, "r": 1.0},
    "matrix-beta": {"p": 2.0, "q": 1.5},
    "gen-matrix": {"a": 1.5, "b": 2.0, "c": 0.5},
    "kshirsagar": {"p": 2.0, "q": 1.5},
    "neutrality": {"p": 1.5, "q": 2.0, "r": 1.0, "s": 1.2},
    "dirichlet-rep": {"p": 2.0, "q": 1.5, "r": 1.0},
    "funceq-family": {"p": 1.0, "q": 1.0, "r": 1.0},
    "perpetuity-r": {"p": 2.0, "q": 1.5, "r": 1.0},
    "perpetuity-s": {"p": 2.0, "q": 1.5, "r": 1.0},
    "perpetuity-t": {"p": 2.0, "q": 1.5, "r": 1.0},
}

IDENTITY_TOL = 1e-12
RESIDUAL_TOL = 1e-9
STATIONARY_KS_BUDGET = 0.02
NORMALIZATION_TOL = 0.01


@dataclass
class VerifyConfig:
    n: int = 100_000
    seeds: tuple = tuple(range(20))
    min_pass: int = 16
    alpha: float = 0.01
    n_perm: int = 200
    bins: int = 4
    grid: int = 10
    burn: int = 1000
    keep: int = 100_000
    mc_n: int = 1_000_000
    threads: int = field(default_factory=lambda: max(1, int(os.environ.get("BETAFLOW_THREADS", "1"))))


@dataclass
class ScenarioResult:
    name: str
    params: dict
    reports: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    def to_dict(self):
        return {
            "scenario": self.name,
            "params": self.params,
            "reports": [r.to_dict() for r in self.reports],
            "diagnostics": self.diagnostics,
            "pass": self.passed,
        }


def _stream_id(name):
    return zlib.crc32(name.encode("ascii"))


def _per_seed(cfg, name, fn):
    """Run fn(rng, seed) -> list[TestReport] for each seed; fold by report position."""
    sid = _stream_id(name)

    def one(seed):
        return fn(RngStream(seed, sid), seed)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            runs = list(pool.map(one, cfg.seeds))
    else:
        runs = [one(s) for s in cfg.seeds]
    folded = []
    for k, first in enumerate(runs[0]):
        column = [run[k] for run in runs]
        folded.append(seed_rule(f"{name}/{first.name}", column, cfg.min_pass, seed=cfg.seeds[0]))
    return folded


def _beta_cdf(a, b):
    return lambda x: dist.beta_cdf(x, a, b)


def _pairwise_dcov(cfg, rng, seed, coords, labels):
    out = []
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            out.append(dcov_perm_test(coords[i], coords[j], cfg.n_perm, rng.child(100 + 10 * i + j),
                                      cfg.alpha, f"dcov_{labels[i]}_{labels[j]}", seed))
    return out


# -- cube law pushed through Psi ----------------------------------------------


def _theorem1_reports(cfg, params, with_ks, with_indep):
    shapes = TriShapeParams(**params)

    def run(rng, seed):
        y = dist.sample_theorem1_cube(rng.child(0), shapes, cfg.n)
        z = tr.big_psi(y, check=False)
        reports = []
        if with_ks:
            fresh = dist.sample_theorem1_cube(rng.child(1), shapes, cfg.n)
            for k in range(3):
                reports.append(ks_two_sample(z[k], fresh[k], cfg.alpha, f"ks2_z{k + 1}_vs_y{k + 1}", seed))
        if with_indep:
            reports += _pairwise_dcov(cfg, rng, seed, z, ("z1", "z2", "z3"))
            reports.append(chi2_indep_grid(z, cfg.bins, cfg.alpha, "chi2_joint_z", seed))
        return reports

    return run


def scenario_theorem1(cfg, params):
    name = "theorem1"
    return _per_seed(cfg, name, _theorem1_reports(cfg, params, True, True))


def scenario_theorem1_independence(cfg, params):
    name = "theorem1-independence"
    return _per_seed(cfg, name, _theorem1_reports(cfg, params, False, True))


# -- matrix laws --------------------------------------------------------------


def _sign_contingency(x12, alpha, name, seed):
    """Chi-square on sign(x12) x quartile(|x12|); fair independent sign expected."""
    mag = np.abs(x12)
    edges = np.quantile(mag, [0.25, 0.5, 0.75])
    q = np.searchsorted(edges, mag, side="right")
    table = np.zeros((2, 4))
    np.add.at(table, ((x12 > 0).astype(int), q), 1.0)
    # fair-coin sign: each quartile cell expects half its column total
    expected = np.vstack([table.sum(axis=0) / 2.0] * 2)
    stat = float(np.sum((table - expected) ** 2 / expected))
    p = float(stats.chi2.sf(stat, 4))
    return TestReport.from_p_value(name, stat, p, alpha, int(x12.size), seed)


def scenario_matrix_beta(cfg, params):
    mp = MatrixBetaParams(**params)
    p, q = mp.p, mp.q

    def run(rng, seed):
        x = dist.sample_matrix_beta2(rng.child(0), mp, cfg.n)
        reports = []
        for i in (1, 2):
            t = tr.tan_triple(i, x)
            reports.append(ks_one_sample(t.diag, _beta_cdf(p, q), cfg.alpha, f"ks_diag{i}", seed))
            reports.append(ks_one_sample(t.schur, _beta_cdf(p - 0.5, q), cfg.alpha, f"ks_schur{i}", seed))
            reports.append(ks_one_sample(t.v**2, _beta_cdf(0.5, q - 0.5), cfg.alpha, f"ks_v{i}_sq", seed))
        t1 = tr.tan_triple(1, x)
        reports += _pairwise_dcov(cfg, rng, seed, t1, ("x11", "x2.1", "v1"))
        reports.append(_sign_contingency(x.x12, cfg.alpha, "sign_symmetry_x12", seed))
        return reports

    return _per_seed(cfg, "matrix-beta", run)


def scenario_kshirsagar(cfg, params):
    mp = MatrixBetaParams(**params)
    p, q = mp.p, mp.q
    reports = []
    # deterministic reconstruction check on one large draw
    x = dist.sample_matrix_beta2(RngStream(cfg.seeds[0], _stream_id("kshirsagar/recon")), mp, cfg.n)
    back = tr.kshirsagar_compose(tr.kshirsagar_decompose(x))
    err = max(float(np.max(np.abs(np.asarray(b) - np.asarray(a)))) for a, b in zip(x, back))
    reports.append(TestReport.from_bound("kshirsagar/reconstruction_max_abs", err, 1e-14, cfg.n, cfg.seeds[0]))

    def run(rng, seed):
        xs = dist.sample_matrix_beta2(rng.child(0), mp, cfg.n)
        f = tr.kshirsagar_decompose(xs)
        t11sq, t22sq = f.t11**2, f.t22**2
        return [
            ks_one_sample(t11sq, _beta_cdf(p, q), cfg.alpha, "ks_t11_sq", seed),
            ks_one_sample(t22sq, _beta_cdf(p - 0.5, q), cfg.alpha, "ks_t22_sq", seed),
            dcov_perm_test(t11sq, t22sq, cfg.n_perm, rng.child(7), cfg.alpha, "dcov_t11sq_t22sq", seed),
        ]

    return reports + _per_seed(cfg, "kshirsagar", run)


def gen_matrix_mc_normalization(params, n, rng):
    """Monte Carlo integral of the generalized density over D_2 from the box (0,1)^2 x (-1,1)."""
    u = rng.uniform((n, 3))
    x = (u[:, 0], 2.0 * u[:, 1] - 1.0, u[:, 2])
    inside = in_D2(x)
    vals = np.zeros(n)
    pts = tuple(c[inside] for c in x)
    vals[inside] = np.exp(dist.gen_matrix_logpdf(pts, params))
    return 2.0 * float(vals.mean()), 2.0 * float(vals.std(ddof=1)) / np.sqrt(n)


def random_D2_points(rng, n):
    """Uniform points of D_2 by rejection from the box (0,1)^2 x (-1,1)."""
    chunks, have = [], 0
    while have < n:
        u = rng.uniform((4 * n, 3))
        x = np.column_stack([u[:, 0], 2.0 * u[:, 1] - 1.0, u[:, 2]])
        x = x[in_D2((x[:, 0], x[:, 1], x[:, 2]), tr.BOUNDARY)]
        chunks.append(x)
        have += len(x)
    x = np.concatenate(chunks)[:n]
    return x[:, 0], x[:, 1], x[:, 2]


def scenario_gen_matrix(cfg, params):
    gp = GenMatrixParams(**params)
    a, b, c = gp.a, gp.b, gp.c
    reports = []
    base = RngStream(cfg.seeds[0], _stream_id("gen-matrix/det"))
    integral, se = gen_matrix_mc_normalization(gp, cfg.mc_n, base.child(0))
    reports.append(TestReport.from_bound("gen-matrix/mc_normalization_abs_err", abs(integral - 1.0),
                                         NORMALIZATION_TOL, cfg.mc_n, cfg.seeds[0]))
    at_half = abs(c - 0.5) < 1e-15
    if at_half:
        pts = random_D2_points(base.child(1), 1000)
        diff = np.abs(dist.gen_matrix_logpdf(pts, gp)
                      - dist.matrix_beta2_logpdf(pts, MatrixBetaParams(a + 0.5, b + 0.5)))
        reports.append(TestReport.from_bound("gen-matrix/logpdf_vs_matrix_beta_max_abs",
                                             float(diff.max()), IDENTITY_TOL, 1000, cfg.seeds[0]))

    def run(rng, seed):
        x = dist.sample_gen_matrix(rng.child(0), gp, cfg.n)
        t = tr.tan_triple(1, x)
        out = [
            ks_one_sample(t.diag, _beta_cdf(a + c, b + c), cfg.alpha, "ks_x11", seed),
            ks_one_sample(t.schur, _beta_cdf(a, b + c), cfg.alpha, "ks_x2.1", seed),
            ks_one_sample(t.v**2, _beta_cdf(c, b), cfg.alpha, "ks_v1_sq", seed),
            _sign_contingency(x.x12, cfg.alpha, "sign_symmetry_x12", seed),
        ]
        out += _pairwise_dcov(cfg, rng, seed, t, ("x11", "x2.1", "v1"))
        if at_half:
            other = dist.sample_matrix_beta2(rng.child(1), MatrixBetaParams(a + 0.5, b + 0.5), cfg.n)
            for label, u, w in zip(("x11", "x12", "x22"), x, other):
                out.append(ks_two_sample(u, w, cfg.alpha, f"ks2_{label}_vs_matrix_beta", seed))
        return out

    return reports + _per_seed(cfg, "gen-matrix", run)


# -- section 5 ----------------------------------------------------------------


def sample_neutrality_cube(rng, params, n):
    """Y ~ B_I(p, q+r+s) x B_I(q, r+s) x B_I(r, s)."""
    p, q, r, s = params.p, params.q, params.r, params.s
    return UnitCube3(beta_variates(rng, p, q + r + s, n), beta_variates(rng, q, r + s, n),
                     beta_variates(rng, r, s, n))


def scenario_neutrality(cfg, params):
    npar = NeutralityParams(**params)
    p, q, r, s = npar.p, npar.q, npar.r, npar.s

    def run(rng, seed):
        y = sample_neutrality_cube(rng.child(0), npar, cfg.n)
        z = tr.neutrality_map(y, check=False)
        out = [
            ks_one_sample(z[0], _beta_cdf(p, s), cfg.alpha, "ks_z1", seed),
            ks_one_sample(z[1], _beta_cdf(q, p + s), cfg.alpha, "ks_z2", seed),
            ks_one_sample(z[2], _beta_cdf(r, p + q + s), cfg.alpha, "ks_z3", seed),
        ]
        return out + _pairwise_dcov(cfg, rng, seed, z, ("z1", "z2", "z3"))

    return _per_seed(cfg, "neutrality", run)


def scenario_dirichlet_rep(cfg, params):
    shapes = TriShapeParams(**params)
    p, q, r = shapes.p, shapes.q, shapes.r
    reports = []
    y = dist.sample_theorem1_cube(RngStream(cfg.seeds[0], _stream_id("dirichlet-rep/identity")), shapes, cfg.n)
    rep = tr.dirichlet_rep(y, check=False)
    lhs = tr.dirichlet_rep_to_psi(rep)
    rhs = tr.big_psi(y, check=False)
    err = max(float(np.max(np.abs(u - v))) for u, v in zip(lhs, rhs))
    reports.append(TestReport.from_bound("dirichlet-rep/identity_with_psi_max_abs", err, IDENTITY_TOL,
                                         cfg.n, cfg.seeds[0]))

    def run(rng, seed):
        yy = dist.sample_theorem1_cube(rng.child(0), shapes, cfg.n)
        u, v1, v2 = tr.dirichlet_rep(yy, check=False)
        w1, w2 = u * v1, u * v2
        d1, d2, _ = dist.sample_dirichlet3(rng.child(1), p, r, q, cfg.n)
        return [
            ks_one_sample((v1 + v2) * u, _beta_cdf(p + r, q), cfg.alpha, "ks_sum_times_u", seed),
            ks_one_sample(v1, _beta_cdf(p, q + r), cfg.alpha, "ks_v1", seed),
            ks_one_sample(v2, lambda t: dist.beta2_cdf(t, r, p + q + r), cfg.alpha, "ks_v2_beta2", seed),
            ks_one_sample(w1, _beta_cdf(p, q + r), cfg.alpha, "ks_w1", seed),
            ks_one_sample(w2 / (1.0 - w1), _beta_cdf(r, q), cfg.alpha, "ks_w2_over_1mw1", seed),
            ks_two_sample(w1, d1, cfg.alpha, "ks2_w1_vs_dirichlet", seed),
            ks_two_sample(w2, d2, cfg.alpha, "ks2_w2_vs_dirichlet", seed),
        ]

    return reports + _per_seed(cfg, "dirichlet-rep", run)


def scenario_funceq(cfg, params):
    if "alpha" in params:
        sp = SolutionParams(params["alpha"], params["beta"], params["gamma"], tuple(params["A"]))
    else:
        sp = params_from_shapes(params["p"], params["q"], params["r"])
    res = max_grid_residual(sp, cfg.grid)
    k = cfg.grid
    return [TestReport.from_bound("funceq-family/max_grid_residual", res, RESIDUAL_TOL, k**3, None)], {
        "solution_params": sp.to_dict(),
        "grid": k,
        "max_residual": res,
    }


def _identity_report(eq, shapes, n, seed):
    rng = RngStream(seed, _stream_id(f"perpetuity-{eq.value}/identity"))
    y1, y2, y3 = dist.sample_theorem1_cube(rng, shapes, n)
    co = perp.coeffs_from_y(eq, y1, y2, y3)
    if eq is perp.EqKind.AFFINE_R:
        err = np.max(np.abs(co.A + co.B - y2))
        label = "A_plus_B_minus_Y2_max_abs"
    elif eq is perp.EqKind.AFFINE_S:
        err = np.max(np.abs((co.C + co.D) * y1 - 1.0))
        label = "C_plus_D_times_Y1_minus_1_max_abs"
    else:
        err = np.max(np.abs(co.a + co.b + co.c - 1.0))
        label = "a_plus_b_plus_c_minus_1_max_abs"
    return TestReport.from_bound(f"perpetuity-{eq.value}/{label}", float(err), 1e-13, n, seed)


def perpetuity_run(cfg, eq, params, inits=None):
    """Chain, stationary KS and two-start diagnostic for one equation.

    Returns (reports, diagnostics, kept_states).
    """
    eq = perp.EqKind.parse(eq)
    shapes = TriShapeParams(**params)
    seed = cfg.seeds[0]
    base = RngStream(seed, _stream_id(f"perpetuity-{eq.value}"))
    if inits is None or len(inits) == 0:
        inits = {"r": [0.1, 0.9], "s": [1.5, 50.0], "t": [1.01, 100.0]}[eq.value]
    kept = perp.run_chain(eq, base.child(0), shapes, cfg.burn, cfg.keep, inits[0])
    target = perp.target_sample(eq, base.child(1), shapes, cfg.keep)
    ks_target = ks_two_sample_statistic(kept, target)
    diagnostics = {"ks_vs_target": ks_target, "burn": cfg.burn, "keep": cfg.keep,
                   "inits": [float(v) for v in inits]}
    if len(inits) >= 2:
        path = perp.run_coupled(eq, base.child(2), shapes, inits[:2], cfg.burn, cfg.keep)
        diagnostics["two_start_ks"] = ks_two_sample_statistic(path[0], path[1])
        diagnostics["two_start_max_gap"] = float(np.max(np.abs(path[0] - path[1])))
    reports = [_identity_report(eq, shapes, cfg.mc_n, seed)]
    if eq is not perp.EqKind.MOBIUS_T:
        reports.append(TestReport.from_bound(f"perpetuity-{eq.value}/ks_vs_target", ks_target,
                                             STATIONARY_KS_BUDGET, cfg.keep, seed))
        if "two_start_ks" in diagnostics:
            reports.append(TestReport.from_bound(f"perpetuity-{eq.value}/two_start_ks",
                                                 diagnostics["two_start_ks"], STATIONARY_KS_BUDGET,
                                                 cfg.keep, seed))
    else:
        diagnostics["uniqueness"] = "open; distances reported only"
    return reports, diagnostics, kept


_RUNNERS = {
    "theorem1": scenario_theorem1,
    "theorem1-independence": scenario_theorem1_independence,
    "matrix-beta": scenario_matrix_beta,
    "gen-matrix": scenario_gen_matrix,
    "kshirsagar": scenario_kshirsagar,
    "neutrality": scenario_neutrality,
    "dirichlet-rep": scenario_dirichlet_rep,
}


def run_scenario(name, cfg=None, params=None):
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}")
    cfg = cfg or VerifyConfig()
    merged = dict(DEFAULT_PARAMS[name])
    if params:
        if name == "funceq-family" and "alpha" in params:
            merged = {}
        merged.update(params)
    if name == "funceq-family":
        reports, diag = scenario_funceq(cfg, merged)
        return ScenarioResult(name, merged, reports, diag)
    if name.startswith("perpetuity-"):
        reports, diag, _ = perpetuity_run(cfg, name[-1], merged)
        return ScenarioResult(name, merged, reports, diag)
    return ScenarioResult(name, merged, _RUNNERS[name](cfg, merged))
