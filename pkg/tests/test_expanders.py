import math

import numpy as np
import pytest

from liplab.expanders import (
    ExpanderProfile,
    adjacency_spectrum,
    asserted_profile,
    diameter,
    exhaustive_lambda,
    exhaustive_lambda_bruteforce,
    spectral_lambda,
    verify_expander_props,
)
from liplab.graphs import (
    complete_graph,
    cycle_graph,
    hypercube_graph,
    petersen_graph,
    random_regular_graph,
    wired_tree_graph,
)

TOL = 1e-9


# ---------------------------------------------------------------------------
# Spectral certificates against first-principles oracles
# ---------------------------------------------------------------------------

def test_complete_graph_spectrum_oracle(k6):
    # adjacency of K6 is J - I: the all-ones vector has eigenvalue n-1 and
    # anything orthogonal to it has eigenvalue -1
    a = k6.adjacency_matrix()
    ones = np.ones(6)
    assert np.allclose(a @ ones, 5 * ones)
    for i in range(1, 6):
        x = np.zeros(6)
        x[0], x[i] = 1.0, -1.0
        assert np.allclose(a @ x, -x)
    assert spectral_lambda(k6).lam == pytest.approx(1.0, abs=TOL)


def test_cycle_spectrum_oracle(c4):
    # circulant eigenvectors: v_j[k] = cos(2*pi*j*k/n) has eigenvalue 2cos(2*pi*j/n)
    a = c4.adjacency_matrix()
    for j in range(4):
        mu = 2 * math.cos(2 * math.pi * j / 4)
        v = np.cos(2 * math.pi * j * np.arange(4) / 4)
        assert np.allclose(a @ v, mu * v, atol=1e-12)
    assert spectral_lambda(c4).lam == pytest.approx(2.0, abs=TOL)


def test_hypercube_spectrum_oracle(q3):
    # character vectors chi_S(x) = (-1)^{|S & x|} have eigenvalue d - 2|S|
    a = q3.adjacency_matrix()
    for s in range(8):
        chi = np.array([(-1) ** bin(s & x).count("1") for x in range(8)], dtype=float)
        mu = 3 - 2 * bin(s).count("1")
        assert np.allclose(a @ chi, mu * chi)
    assert spectral_lambda(q3).lam == pytest.approx(3.0, abs=TOL)


def test_petersen_spectral(petersen):
    # known spectrum 3, 1^5, (-2)^4
    vals = adjacency_spectrum(petersen)
    assert vals[-1] == pytest.approx(3.0, abs=1e-8)
    assert spectral_lambda(petersen).lam == pytest.approx(2.0, abs=1e-8)


def test_spectral_requires_regular():
    with pytest.raises(ValueError, match="not regular"):
        spectral_lambda(wired_tree_graph(2, 3))


def test_spectral_lower_bound_floor():
    # every d-regular graph forces lam >= sqrt(d) * (1 - d/n)
    for g in [complete_graph(6), cycle_graph(8), hypercube_graph(3), petersen_graph(),
              random_regular_graph(12, 4, seed=2)]:
        d, n = g.regular_degree(), g.n
        assert spectral_lambda(g).lam >= math.sqrt(d) * (1 - d / n) - TOL


# ---------------------------------------------------------------------------
# Exhaustive certificates
# ---------------------------------------------------------------------------

def test_exhaustive_k3(k3):
    prof = exhaustive_lambda(k3)
    assert prof.lam == pytest.approx(2.0 / 3.0, abs=TOL)
    assert prof.method == "exhaustive"
    # independent pure-Python sweep agrees
    assert exhaustive_lambda_bruteforce(k3) == pytest.approx(prof.lam, abs=TOL)


@pytest.mark.parametrize("builder", [lambda: complete_graph(4), lambda: cycle_graph(5),
                                     lambda: hypercube_graph(2)])
def test_exhaustive_matches_bruteforce(builder):
    g = builder()
    assert exhaustive_lambda(g).lam == pytest.approx(exhaustive_lambda_bruteforce(g), abs=TOL)


def test_exhaustive_below_spectral():
    for seed in range(6):
        g = random_regular_graph(10, 3, seed=seed)
        assert exhaustive_lambda(g).lam <= spectral_lambda(g).lam + TOL


def test_exhaustive_cap():
    with pytest.raises(ValueError, match="capped"):
        exhaustive_lambda(random_regular_graph(16, 3, seed=0), cap=14)


def test_full_sets_never_bind(k6):
    # S = T = V gives |2|E| - d n| = 0, so removing that pair changes nothing
    prof = exhaustive_lambda(k6)
    d, n = 5, 6
    assert abs(2 * k6.m - d * n) == 0
    assert prof.lam > 0


# ---------------------------------------------------------------------------
# Consequence checks
# ---------------------------------------------------------------------------

def test_props_k6_direct_values(k6):
    prof = exhaustive_lambda(k6)
    report = verify_expander_props(k6, prof)
    assert report["all_ok"]
    by_name = {c["name"]: c for c in report["checks"]}
    # ball of radius 1 is everything, bound is min(3, (5/2lam)^2)
    assert by_name["volume-growth"]["status"] == "pass"
    diam_check = by_name["diameter-bound"]
    assert diam_check["status"] == "pass"
    assert diam_check["details"]["diameter"] == 1


def test_props_diameter_gate(c4):
    prof = spectral_lambda(c4)  # lam = d = 2
    report = verify_expander_props(c4, prof)
    by_name = {c["name"]: c for c in report["checks"]}
    assert by_name["diameter-bound"]["status"] == "skipped"
    assert report["all_ok"]


def test_props_pass_on_certified_graphs(petersen, q3):
    for g in (petersen, q3, complete_graph(4)):
        prof = exhaustive_lambda(g)
        assert verify_expander_props(g, prof)["all_ok"]


def test_props_fail_with_bogus_lambda(petersen):
    # an impossibly small certificate must produce failures, not errors
    report = verify_expander_props(petersen, asserted_profile(petersen, 0.05))
    assert not report["all_ok"]
    failing = [c for c in report["checks"] if c["status"] == "fail"]
    assert failing and any(c["witness"] for c in failing)


def test_props_sampled_mode():
    g = random_regular_graph(18, 4, seed=1)
    report = verify_expander_props(g, spectral_lambda(g), cap=14, sample_count=300, seed=5)
    assert report["mode"] == "sampled"
    statuses = {c["name"]: c["status"] for c in report["checks"]}
    assert statuses["joining-edge"] in ("sampled", "fail")
    assert statuses["volume-growth"] == "pass"  # exhaustive regardless of subset sampling


# ---------------------------------------------------------------------------
# Diameter
# ---------------------------------------------------------------------------

def test_diameter_values():
    assert diameter(cycle_graph(6)) == 3
    assert diameter(complete_graph(7)) == 1
    assert diameter(hypercube_graph(4)) == 4


def test_profile_validation():
    with pytest.raises(ValueError):
        ExpanderProfile(n=4, d=2, lam=-1.0, method="spectral")
    with pytest.raises(ValueError):
        ExpanderProfile(n=4, d=2, lam=1.0, method="guessed")
