"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its elapsed time (run with -s to see them)."""

import os
import time

import numpy as np
import pytest

pytestmark = pytest.mark.acceptance

from cstl.admm import AdmmOptions, PooledSystem, admm_solve, build_factored_system
from cstl.cli import main
from cstl.data import Dataset
from cstl.lasso import LassoConfig
from cstl.oracle import oracle_fit, oracle_fit_reference
from cstl.simulate import ScenarioSpec, make_scenario, run_replications
from cstl.structure import build_transfer_structure
from cstl.tuning import TuningGrid, grid_search_cstl, sse
from cstl.weights import WeightScheme, ideal_weight_scheme

from reference import materialize_d, reference_objective_minimum

# desk-scale sweep configuration: default grid and solver tolerance, with a
# trimmed lasso path to keep 260 replicate fits inside the budget
DESK_GRID = TuningGrid.default(d_t=100, n_t=100)
DESK_LASSO = LassoConfig(n_lambda=30)
DESK_ADMM = AdmmOptions(eps_abs=1e-5, max_iter=8000)

# low-dimensional examples: same lambda0 default, lambda1 grid reaching the
# fusion-relevant scale of the n_t = 100 noise level
EXAMPLE_GRID = TuningGrid(
    tuple(np.geomspace(1.0, 0.01, 10) * np.sqrt(np.log(3) / 100)),
    tuple(np.geomspace(0.3, 0.003, 10)),
)


def _report(name, elapsed, budget):
    print(f"[acceptance] {name}: PASS ({elapsed:.1f}s, budget {budget:.0f}s)")


def test_c1_operator_correctness():
    start = time.time()
    rng = np.random.default_rng(1)
    from cstl.admm import d_apply, dt_apply

    for d_t in range(1, 6):
        for d_s in range(1, 6):
            D = materialize_d(d_t, d_s)
            for _ in range(100):
                # integer vectors make every partial sum exact, so agreement
                # is bitwise despite different summation orders
                eta = rng.integers(-9, 10, size=d_t + d_s).astype(float)
                v = rng.integers(-9, 10, size=d_t * d_s).astype(float)
                np.testing.assert_array_equal(d_apply(eta, d_t, d_s), D @ eta)
                np.testing.assert_array_equal(dt_apply(v, d_t, d_s), D.T @ v)
            target = Dataset(np.zeros((3, d_t)), np.zeros(3))
            source = Dataset(np.zeros((3, d_s)), np.zeros(3), "source")
            ps = PooledSystem.from_datasets(target, source)
            fs = build_factored_system(ps, rho0=1.0, rho1=1.0)
            A = np.hstack([np.eye(d_t), np.zeros((d_t, d_s))])
            np.testing.assert_array_equal(fs.gram - A.T @ A, D.T @ D)
    elapsed = time.time() - start
    assert elapsed < 1.0
    _report("C1 operator-correctness", elapsed, 1)


def test_c2_admm_matches_proximal_subgradient_reference():
    start = time.time()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        d, n = 4, 50
        Xt = rng.standard_normal((n, d))
        Xs = rng.standard_normal((n, d))
        beta = rng.normal(0, 1, d) * (rng.random(d) < 0.7)
        theta = rng.normal(0, 1, d)
        yt = Xt @ beta + rng.standard_normal(n)
        ys = Xs @ theta + rng.standard_normal(n)
        target, source = Dataset(Xt, yt), Dataset(Xs, ys, "source")
        w = rng.random(d)
        W = rng.random((d, d))
        lam0 = rng.uniform(0.05, 0.3)
        lam1 = rng.uniform(0.05, 0.3)
        ps = PooledSystem.from_datasets(target, source)
        res = admm_solve(ps, WeightScheme(w, W, "scad"), lam0, lam1,
                         opts=AdmmOptions(eps_abs=1e-12, max_iter=200000))
        ref = reference_objective_minimum(target, source, w, W, lam0, lam1,
                                          steps=10 ** 6)
        rel = abs(res.objective - ref) / abs(ref)
        worst = max(worst, rel)
        assert rel <= 1e-6
    elapsed = time.time() - start
    assert elapsed < 120.0
    _report(f"C2 admm-objective-vs-reference (worst rel {worst:.1e})",
            elapsed, 120)


def test_c3_oracle_equivalence():
    start = time.time()
    rng = np.random.default_rng(3)
    values = np.array([-2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0])
    seen_empty_specific = seen_no_shared = 0
    for _ in range(100):
        d_t = int(rng.integers(1, 11))
        d_s = int(rng.integers(1, 11))
        beta = rng.choice(values, size=d_t)
        theta = rng.choice(values, size=d_s)
        n_t, n_s = 40, 50
        Xt = rng.standard_normal((n_t, d_t))
        Xs = rng.standard_normal((n_s, d_s))
        yt = Xt @ beta + rng.standard_normal(n_t)
        ys = Xs @ theta + rng.standard_normal(n_s)
        target, source = Dataset(Xt, yt), Dataset(Xs, ys, "source")
        ts = build_transfer_structure(beta, theta)
        fit = oracle_fit(target, source, ts)
        ref = oracle_fit_reference(target, source, ts)
        assert np.max(np.abs(fit.beta - ref.beta)) <= 1e-8
        assert np.max(np.abs(fit.theta - ref.theta)) <= 1e-8
        if ts.n_shared_values == 0:
            seen_no_shared += 1
            # no transferable values: target block equals target-only OLS
            active = list(ts.target_support)
            if active:
                Xa = Xt[:, active]
                ols = np.linalg.solve(Xa.T @ Xa, Xa.T @ yt)
                assert np.max(np.abs(fit.beta[active] - ols)) <= 1e-8
        if not ts.target_specific and not ts.source_specific:
            seen_empty_specific += 1
    assert seen_no_shared > 0 and seen_empty_specific > 0
    elapsed = time.time() - start
    assert elapsed < 30.0
    _report("C3 oracle-closed-form-vs-reference", elapsed, 30)


def test_c4_ideal_weights_reach_oracle():
    start = time.time()
    spec = ScenarioSpec("EX1", seed=4, replicates=100)
    hits = 0
    for rep in range(100):
        inst = make_scenario(spec, rep)
        ps = PooledSystem.from_datasets(inst.target, inst.source)
        ws = ideal_weight_scheme(inst.structure, 3, 3)
        res = admm_solve(ps, ws, 10.0, 10.0,
                         opts=AdmmOptions(eps_abs=1e-8, max_iter=50000))
        ora = oracle_fit(inst.target, inst.source, inst.structure)
        err = max(np.max(np.abs(res.beta - ora.beta)),
                  np.max(np.abs(res.theta - ora.theta)))
        hits += err <= 1e-3
    assert hits >= 95
    elapsed = time.time() - start
    assert elapsed < 60.0
    _report(f"C4 ideal-weight-admm-matches-oracle ({hits}/100)", elapsed, 60)


def _example_study(setting, replicates=500, seed=5):
    """OLS / oracle / data-driven fits for one low-dimensional example."""
    spec = ScenarioSpec(setting, seed=seed, replicates=replicates)
    ols_coefs, oracle_coefs, cstl_fits = [], [], []
    inst = None
    for rep in range(replicates):
        inst = make_scenario(spec, rep)
        X, y = inst.target.design, inst.target.response
        ols_coefs.append(np.linalg.solve(X.T @ X, X.T @ y))
        oracle_coefs.append(oracle_fit(inst.target, inst.source, inst.structure).beta)
        cstl_fits.append(grid_search_cstl(inst.target, inst.source, EXAMPLE_GRID))
    return np.array(ols_coefs), np.array(oracle_coefs), cstl_fits, inst


def test_c5_example1_variance_and_fusion_pattern():
    start = time.time()
    ols, oracle, fits, inst = _example_study("EX1")
    var_ols = ols[:, 0].var(ddof=1)
    var_oracle = oracle[:, 0].var(ddof=1)
    var_cstl = np.array([f.beta[0] for f in fits]).var(ddof=1)
    # pooled-least-squares variance of the shared first coefficient
    derived = 0.25 * (1.0 / 100 + 1.0 / 200)
    assert var_oracle < var_ols
    assert var_cstl < var_ols
    assert 0.7 * derived <= var_oracle <= 1.3 * derived
    mean_mat = np.mean(
        np.array([np.abs(np.subtract.outer(f.beta, f.theta)) for f in fits]), axis=0)
    true_mat = np.abs(np.subtract.outer(inst.beta_true, inst.theta_true))
    assert np.all(mean_mat[true_mat == 0] < 0.05)
    assert np.all(mean_mat[true_mat >= 1] > 0.5)
    elapsed = time.time() - start
    assert elapsed < 300.0
    _report(
        f"C5 example1 (var ols {var_ols:.5f} / cstl {var_cstl:.5f} / "
        f"oracle {var_oracle:.5f} vs {derived:.5f})", elapsed, 300)


def test_c6_example2_fusion_without_negative_transfer():
    start = time.time()
    ols, _, fits, inst = _example_study("EX2")
    mean_mat = np.mean(
        np.array([np.abs(np.subtract.outer(f.beta, f.theta)) for f in fits]), axis=0)
    true_mat = np.abs(np.subtract.outer(inst.beta_true, inst.theta_true))
    assert np.all(mean_mat[true_mat == 0] < 0.05)
    # non-transferable third coefficient tracks plain OLS
    dev = np.mean(np.abs(np.array([f.beta[2] for f in fits]) - ols[:, 2]))
    assert dev < 0.05
    elapsed = time.time() - start
    assert elapsed < 300.0
    _report(f"C6 example2 (mean |b3 - ols3| {dev:.4f})", elapsed, 300)


def _desk_mean_sse(setting, seed=2026, replicates=20, **spec_kw):
    spec = ScenarioSpec(setting, n_t=100, n_s=200, d_t=100,
                        seed=seed, replicates=replicates, **spec_kw)
    table = run_replications(spec, methods=("lasso", "cstl"), grid=DESK_GRID,
                             lasso_cfg=DESK_LASSO, admm_opts=DESK_ADMM)
    means = {r.method: r.sse for r in table.rows if r.replicate == "mean"}
    return means["cstl"], means["lasso"]


def test_c7_setting_robustness_desk_scale():
    start = time.time()
    summary = []

    for setting in ("S1", "S2"):
        by_m = {}
        for m in (0, 4):
            cstl_sse, lasso_sse = _desk_mean_sse(setting, m_overlap=m, d_s=100)
            assert cstl_sse < lasso_sse, f"{setting} m={m}"
            by_m[m] = cstl_sse
        spread = (max(by_m.values()) - min(by_m.values())) / min(by_m.values())
        assert spread < 0.25, f"{setting} varies {spread:.2%} across m"
        summary.append(f"{setting} spread {spread:.2%}")

    for variant in ("S3_noperm", "S3_perm"):
        for h in (0.0, 0.25, 0.5):
            cstl_sse, lasso_sse = _desk_mean_sse(variant, h=h, d_s=100)
            assert cstl_sse < lasso_sse, f"{variant} h={h}"
        summary.append(f"{variant} ok")

    for d_s in (80, 100, 120):
        cstl_sse, lasso_sse = _desk_mean_sse("S4", d_s=d_s)
        assert cstl_sse < lasso_sse, f"S4 d_s={d_s}"
    summary.append("S4 ok")

    elapsed = time.time() - start
    assert elapsed < 900.0
    _report("C7 desk-scale robustness (" + "; ".join(summary) + ")", elapsed, 900)


@pytest.mark.skipif(not os.environ.get("CSTL_FULL_SCALE"),
                    reason="full-scale study; set CSTL_FULL_SCALE=1 to run")
def test_c7_full_scale_setting4():
    replicates = int(os.environ.get("CSTL_FULL_SCALE_REPS", "100"))
    spec = ScenarioSpec("S4", n_t=200, n_s=500, d_t=600, d_s=600,
                        seed=2026, replicates=replicates)
    grid = TuningGrid(
        tuple(np.geomspace(1.0, 0.01, 6) * np.sqrt(np.log(600) / 200)),
        tuple(np.geomspace(1.0, 0.01, 6) * np.sqrt(np.log(600) / 200)),
    )
    table = run_replications(spec, methods=("lasso", "cstl"), grid=grid,
                             lasso_cfg=DESK_LASSO, admm_opts=DESK_ADMM)
    means = {r.method: r.sse for r in table.rows if r.replicate == "mean"}
    assert means["cstl"] < means["lasso"]
    # published full-scale benchmark error for this design is 0.053; require
    # the same order of magnitude
    assert means["cstl"] < 2 * 0.053
    print(f"[acceptance] C7-full-scale: PASS (cstl {means['cstl']:.5f}, "
          f"lasso {means['lasso']:.5f})")


def test_c8_manifest_determinism(tmp_path):
    start = time.time()
    out = tmp_path / "run"
    args = ["--command", "simulate", "--setting", "S3_perm", "--h", "0.25",
            "--dt", "20", "--ds", "20", "--nt", "60", "--ns", "80",
            "--reps", "3", "--seed", "13", "--n-grid", "4",
            "--eps-abs", "1e-4", "--out", str(out)]
    assert main(args) == 0
    first = (out / "results.csv").read_bytes()
    manifest = (out / "manifest.txt").read_bytes()
    assert main(["--config", str(out / "manifest.txt")]) == 0
    assert (out / "results.csv").read_bytes() == first
    assert (out / "manifest.txt").read_bytes() == manifest
    elapsed = time.time() - start
    _report("C8 manifest-rerun-byte-identical", elapsed, 60)
