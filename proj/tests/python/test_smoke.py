import numpy as np
import pytest

import zdmtd

# Three targets where one defender target equalizes the attacker: an ideal
# ZD strategy exists.
IDEAL = {
    "k": 3,
    "u_d_cov": [5, 3, 2],
    "u_d_unc": [0, -2, -1],
    "u_a_cov": [-2, 1, 0],
    "u_a_unc": [3, -2, -4],
}


def uniform(k):
    return np.full((k * k, k), 1.0 / k)


def test_solve_ideal_builds_verified_strategy():
    r = zdmtd.solve(IDEAL, verify_samples=50, seed=1)
    assert r["kind"] == "ideal"
    pi = r["pi"]
    assert pi.shape == (9, 3)
    assert np.allclose(pi.sum(axis=1), 1.0)
    assert r["residuals"]["defining"] < 1e-8
    assert abs(r["realized"]["u_d"] - r["expected_br"]) < 1e-6
    rep = zdmtd.verify(IDEAL, r["strategy"], n_samples=100, seed=2)
    assert rep["passed"]


def test_solve_ideal_mode_without_ideal_point_has_no_strategy():
    g = {"k": 2, "u_d_cov": [1, 0], "u_d_unc": [-5, -5], "u_a_cov": [0, 0], "u_a_unc": [5, 1]}
    r = zdmtd.solve(g, mode="ideal")
    assert r["kind"] == "none"
    assert "pi" not in r


def test_long_run_utilities_uniform_is_average_payoff():
    u_d, u_a = zdmtd.long_run_utilities(IDEAL, uniform(3), uniform(3))
    # Covered with probability 1/3 at each target.
    exp_d = np.mean([(c + 2 * u) / 3 for c, u in zip(IDEAL["u_d_cov"], IDEAL["u_d_unc"])])
    exp_a = np.mean([(c + 2 * u) / 3 for c, u in zip(IDEAL["u_a_cov"], IDEAL["u_a_unc"])])
    assert u_d == pytest.approx(exp_d, abs=1e-12)
    assert u_a == pytest.approx(exp_a, abs=1e-12)


def test_best_response_and_simulate():
    br = zdmtd.best_response(IDEAL, uniform(3))
    assert len(br["policy"]) == 9
    t = zdmtd.simulate(IDEAL, uniform(3), steps=20000, seed=3, stride=5000)
    assert t["steps"] == 20000
    assert len(t["series"]) == 4
    assert abs(t["avg_u_a"] - br["u_a"]) < 4 * t["se_u_a"] + 1e-3


def test_oneshot_compare_and_mip():
    s = zdmtd.oneshot_sse(IDEAL)
    assert sum(s["x"]) == pytest.approx(1.0)
    rows = {r["strategy"]: r["value"] for r in zdmtd.compare(IDEAL, budget=5, seed=0)}
    assert rows["zd"] <= rows["upper_bound"] + 1e-9
    assert zdmtd.emit_mip(IDEAL).startswith("\\")


def test_suites_and_errors():
    suites = zdmtd.default_suites()
    assert len(suites) == 15
    g = zdmtd.suite_game(suites[0])
    assert g["k"] == len(g["u_d_cov"])
    with pytest.raises(ValueError):
        zdmtd.solve({"k": 2, "u_d_cov": [1, 2]})
    with pytest.raises(ValueError):
        zdmtd.solve(IDEAL, mode="bogus")
