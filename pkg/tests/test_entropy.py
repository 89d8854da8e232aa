import itertools
import math

import numpy as np
import pytest

from liplab.entropy import (
    CoverWeights,
    JointPmf,
    check_entropy_properties,
    conditional_entropy,
    entropy,
    entropy_of_map,
    load_pmf,
    save_pmf,
    shearer_check,
)

TOL = 1e-10


def direct_entropy(probs):
    return sum(-p * math.log2(p) for p in probs if p > 0)


# ---------------------------------------------------------------------------
# Marginal entropy
# ---------------------------------------------------------------------------

def test_uniform_four_outcomes():
    p = JointPmf(((0, 1, 2, 3),), {(i,): 0.25 for i in range(4)})
    assert entropy(p, [0]) == pytest.approx(2.0, abs=TOL)


def test_point_mass():
    p = JointPmf(((0, 1),), {(0,): 1.0, (1,): 0.0})
    assert entropy(p, [0]) == pytest.approx(0.0, abs=TOL)


def test_half_quarter_quarter():
    p = JointPmf(((0, 1, 2),), {(0,): 0.5, (1,): 0.25, (2,): 0.25})
    assert entropy(p, [0]) == pytest.approx(1.5, abs=TOL)
    assert direct_entropy([0.5, 0.25, 0.25]) == pytest.approx(1.5, abs=TOL)


def test_marginal_of_joint():
    p = JointPmf.xor_triple()
    for i in range(3):
        assert entropy(p, [i]) == pytest.approx(1.0, abs=TOL)
    assert entropy(p, [0, 1, 2]) == pytest.approx(2.0, abs=TOL)


def test_entropy_bad_coords():
    p = JointPmf.independent_uniform_bits(2)
    with pytest.raises(ValueError):
        entropy(p, [])
    with pytest.raises(ValueError):
        entropy(p, [5])


def test_pmf_validation():
    with pytest.raises(ValueError, match="sum"):
        JointPmf(((0, 1),), {(0,): 0.9})
    with pytest.raises(ValueError, match="support"):
        JointPmf(((0, 1),), {(2,): 1.0})
    with pytest.raises(ValueError, match="arity"):
        JointPmf(((0, 1),), {(0, 1): 1.0})


# ---------------------------------------------------------------------------
# Conditional entropy
# ---------------------------------------------------------------------------

def test_conditional_on_self_is_zero():
    p = JointPmf.random([(0, 1, 2), (0, 1)], seed=4)
    assert conditional_entropy(p, [0], [0]) == pytest.approx(0.0, abs=TOL)


def test_independent_coordinates():
    p = JointPmf.independent_uniform_bits(2)
    assert conditional_entropy(p, [0], [1]) == pytest.approx(entropy(p, [0]), abs=TOL)


def test_copy_coordinate():
    p = JointPmf(((0, 1), (0, 1)), {(0, 0): 0.5, (1, 1): 0.5})
    assert entropy(p, [0]) == pytest.approx(1.0, abs=TOL)
    assert conditional_entropy(p, [0], [1]) == pytest.approx(0.0, abs=TOL)


def test_conditional_chain_identity():
    # H(X|Y) == H(X,Y) - H(Y) on random pmfs
    for seed in range(20):
        p = JointPmf.random([(0, 1), (0, 1, 2), (0, 1)], seed=seed)
        lhs = conditional_entropy(p, [0], [1, 2])
        rhs = entropy(p, [0, 1, 2]) - entropy(p, [1, 2])
        assert lhs == pytest.approx(rhs, abs=TOL)


def test_entropy_of_map():
    p = JointPmf.independent_uniform_bits(2)
    assert entropy_of_map(p, lambda o: o[0] ^ o[1]) == pytest.approx(1.0, abs=TOL)
    assert entropy_of_map(p, lambda o: 0) == pytest.approx(0.0, abs=TOL)


# ---------------------------------------------------------------------------
# Property suite
# ---------------------------------------------------------------------------

def test_properties_on_xor():
    report = check_entropy_properties(JointPmf.xor_triple(), trials=3, seed=1)
    assert report["ok"], report["failures"][:3]
    assert all(v > 0 for v in report["checked"].values())


def test_properties_on_independent_bits():
    report = check_entropy_properties(JointPmf.independent_uniform_bits(3), trials=2, seed=2)
    assert report["ok"]


def test_properties_random_fuzz():
    for seed in range(60):
        p = JointPmf.random([(0, 1), (0, 1, 2), (0, 1)], seed=seed)
        report = check_entropy_properties(p, trials=2, seed=seed)
        assert report["ok"], (seed, report["failures"][:2])


def test_properties_coordinate_cap():
    with pytest.raises(ValueError, match="4"):
        check_entropy_properties(JointPmf.independent_uniform_bits(5))


# ---------------------------------------------------------------------------
# Cover inequality
# ---------------------------------------------------------------------------

def test_cover_two_singletons():
    p = JointPmf.independent_uniform_bits(2)
    cw = CoverWeights((frozenset({0}), frozenset({1})), (1.0, 1.0), frozenset())
    report = shearer_check(p, cw)
    assert report["lhs"] == pytest.approx(2.0, abs=TOL)
    assert report["rhs"] == pytest.approx(2.0, abs=TOL)
    assert report["pass"]


def test_cover_xor_blocks():
    p = JointPmf.xor_triple()
    cw = CoverWeights((frozenset({0, 1}), frozenset({2})), (1.0, 1.0), frozenset())
    report = shearer_check(p, cw)
    assert report["lhs"] == pytest.approx(2.0, abs=TOL)
    assert report["rhs"] == pytest.approx(3.0, abs=TOL)
    assert report["pass"]


def test_cover_pairwise_half_weights_fuzz():
    sets = (frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2}))
    cw = CoverWeights(sets, (0.5, 0.5, 0.5), frozenset())
    for seed in range(100):
        p = JointPmf.random([(0, 1), (0, 1), (0, 1)], seed=seed)
        assert shearer_check(p, cw)["pass"]


def test_cover_with_total_order():
    # full conditioning chain: the bound collapses to H(X) exactly
    order = frozenset({(0, 1), (0, 2), (1, 2)})
    sets = (frozenset({0}), frozenset({1}), frozenset({2}))
    cw = CoverWeights(sets, (1.0, 1.0, 1.0), order)
    for seed in range(30):
        p = JointPmf.random([(0, 1), (0, 1, 2), (0, 1)], seed=seed + 500)
        report = shearer_check(p, cw)
        assert report["pass"]
        assert report["rhs"] == pytest.approx(report["lhs"], abs=TOL)


def test_cover_weight_validation():
    p = JointPmf.independent_uniform_bits(2)
    bad = CoverWeights((frozenset({0}),), (1.0,), frozenset())
    with pytest.raises(ValueError, match="cover weight"):
        shearer_check(p, bad)
    with pytest.raises(ValueError, match="empty"):
        CoverWeights((frozenset(),), (1.0,), frozenset())
    with pytest.raises(ValueError, match="irreflexive"):
        CoverWeights((frozenset({0}),), (1.0,), frozenset({(0, 0)}))
    with pytest.raises(ValueError, match="transitive"):
        CoverWeights((frozenset({0}),), (1.0,), frozenset({(0, 1), (1, 2)}))


# ---------------------------------------------------------------------------
# IO
# ---------------------------------------------------------------------------

def test_pmf_roundtrip(tmp_path):
    p = JointPmf.random([(0, 1), ("a", "b")], seed=9)
    path = tmp_path / "p.json"
    save_pmf(p, path)
    q = load_pmf(path)
    assert q.supports == ((0, 1), ("a", "b"))
    for outcome, prob in p.probs.items():
        assert q.probs[outcome] == pytest.approx(prob, abs=1e-15)
