import math

import numpy as np
import pytest

import nsplab


def test_measure_roundtrip():
    F = nsplab.Measure("mcp_zap(alpha=2)")
    assert F.spec == "mcp_zap(alpha=2)"
    assert F(0.0) == 0.0
    assert F(1.0) == 1.0
    with pytest.raises(ValueError):
        nsplab.Measure("nope")


def test_nsc_l1_generators():
    expected = {(1, 1, 1): 0.5, (1, 2, 4): 4.0 / 3.0}
    for gen, theta in expected.items():
        nu = nsplab.Subspace(np.array(gen, dtype=float).reshape(3, 1))
        r = nsplab.nsc(nu, "l1", 1)
        assert r["theta"] == pytest.approx(theta, abs=1e-12)
        assert r["is_lower_bound"] is False


def test_exp_measure_counterexample():
    nu = nsplab.Subspace(np.array([[1.0], [1.0], [2.0]]))
    assert nsplab.nsp_check(nu, "exp_ce1", 1)["verdict"] == "holds_strict"
    probe = nsplab.rrc_probe(nu, "exp_ce1", 1, 0.01, budget=20000)
    assert probe["outcome"] == "violated"
    rep = nsplab.verify_counterexample1([0.1, 0.01])
    assert rep["all_found"]
    assert rep["margin_at_1"] == pytest.approx((1 - math.exp(-1)) ** 2, rel=1e-12)


def test_recover_sparse_vector():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 6))
    x = np.zeros(6)
    x[2] = 1.5
    r = nsplab.recover(A, A @ x, measure="l1", method="enumerate", k=1)
    assert np.allclose(r["x_hat"], x, atol=1e-9)


def test_null_space_is_orthogonal_to_rows():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((3, 5))
    nu = nsplab.null_space(A)
    assert nu.dim == 2
    assert np.abs(A @ nu.basis).max() < 1e-10


def test_formulas():
    assert nsplab.zeta(1000, 10) == pytest.approx(1.1181554030, abs=1e-9)
    assert nsplab.delta_threshold(100) == pytest.approx(61.0558845559, abs=1e-8)
    assert nsplab.gordon_bound(0.0, 100) == pytest.approx(0.98978869, abs=1e-7)
    t = nsplab.tradeoff(100, 80)
    assert t["delta"] > 0 and t["C"] > t["oracle_C"] > 1


def test_width_whole_sphere_is_chi_mean():
    w = nsplab.width("l1", 4, 4, draws=4000, seed=2)
    assert abs(w["mean"] / w["chi_mean"] - 1) < 0.03


def test_mc_probability_k0_and_subset():
    s = nsplab.mc_probability({"n": 5, "m": 3, "k": 0, "trials": 50})
    assert s["p_erc"]["p"] == 1.0
    s = nsplab.mc_probability({"n": 5, "m": 3, "k": 1, "trials": 100, "d_grid": "0.001,0.1"})
    assert s["subset_violations"] == 0
    for row in s["p_rrc_at_d"]:
        assert row["p_rrc"]["successes"] <= s["p_erc"]["successes"]
