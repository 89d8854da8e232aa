"""Entropy calculus for finite joint distributions, in bits.

Implements marginal and conditional Shannon entropy over named coordinates,
the standard toolbox of entropy inequalities, and the fractional-cover
subadditivity inequality with conditioning along a partial order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

_NORM_TOL = 1e-12
ENTROPY_TOL = 1e-10


@dataclass(frozen=True)
class JointPmf:
    """Finitely supported joint distribution over named discrete coordinates."""

    supports: tuple[tuple, ...]
    probs: dict

    def __post_init__(self):
        n = len(self.supports)
        total = 0.0
        for outcome, p in self.probs.items():
            if len(outcome) != n:
                raise ValueError(f"outcome {outcome} has arity {len(outcome)}, want {n}")
            for i, val in enumerate(outcome):
                if val not in self.supports[i]:
                    raise ValueError(f"value {val!r} outside support of coordinate {i}")
            if p < -_NORM_TOL:
                raise ValueError(f"negative probability {p} at {outcome}")
            total += p
        if abs(total - 1.0) > _NORM_TOL * max(1, len(self.probs)):
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @property
    def n_coords(self) -> int:
        return len(self.supports)

    @classmethod
    def from_outcomes(cls, supports, weighted_outcomes) -> "JointPmf":
        return cls(tuple(tuple(s) for s in supports), dict(weighted_outcomes))

    @classmethod
    def independent_uniform_bits(cls, n: int) -> "JointPmf":
        outcomes = {tuple(bits): 1.0 / 2**n for bits in itertools.product((0, 1), repeat=n)}
        return cls(tuple((0, 1) for _ in range(n)), outcomes)

    @classmethod
    def xor_triple(cls) -> "JointPmf":
        """Two independent uniform bits and their parity."""
        outcomes = {}
        for a, b in itertools.product((0, 1), repeat=2):
            outcomes[(a, b, a ^ b)] = 0.25
        return cls(((0, 1), (0, 1), (0, 1)), outcomes)

    @classmethod
    def random(cls, supports, seed: int, concentration: float = 1.0) -> "JointPmf":
        """Dirichlet-distributed probabilities over the full product support."""
        supports = tuple(tuple(s) for s in supports)
        cells = list(itertools.product(*supports))
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        weights = rng.dirichlet([concentration] * len(cells))
        return cls(supports, {cell: float(w) for cell, w in zip(cells, weights)})


def _grouped(p: JointPmf, key: Callable) -> dict:
    out: dict = {}
    for outcome, prob in p.probs.items():
        if prob <= 0.0:
            continue
        k = key(outcome)
        out[k] = out.get(k, 0.0) + prob
    return out


def _entropy_of_grouping(p: JointPmf, key: Callable) -> float:
    total = 0.0
    for prob in _grouped(p, key).values():
        if prob > 0.0:
            total -= prob * math.log2(prob)
    return total


def _projection(coords: Sequence[int]) -> Callable:
    coords = tuple(coords)
    return lambda outcome: tuple(outcome[i] for i in coords)


def entropy(p: JointPmf, coords) -> float:
    """Marginal entropy H(X_coords) in bits (0 log 1/0 = 0)."""
    coords = tuple(sorted(set(coords)))
    if not coords:
        raise ValueError("coords must be nonempty")
    if any(i < 0 or i >= p.n_coords for i in coords):
        raise ValueError(f"coords {coords} out of range for {p.n_coords} coordinates")
    return _entropy_of_grouping(p, _projection(coords))


def entropy_of_map(p: JointPmf, fn: Callable) -> float:
    """Entropy of an arbitrary derived variable fn(outcome)."""
    return _entropy_of_grouping(p, fn)


def conditional_entropy_maps(p: JointPmf, target_fn: Callable, given_fn: Callable) -> float:
    """H(target | given) for derived variables: average over the conditioning
    cells of the entropy of the target within each cell."""
    cells = _grouped(p, given_fn)
    total = 0.0
    joint: dict = {}
    for outcome, prob in p.probs.items():
        if prob <= 0.0:
            continue
        k = (given_fn(outcome), target_fn(outcome))
        joint[k] = joint.get(k, 0.0) + prob
    for (gval, _tval), prob in joint.items():
        total -= prob * math.log2(prob / cells[gval])
    return total


def conditional_entropy(p: JointPmf, target, given) -> float:
    """H(X_target | X_given); an empty `given` reduces to the marginal entropy."""
    target = tuple(sorted(set(target)))
    given = tuple(sorted(set(given)))
    if not target:
        raise ValueError("target must be nonempty")
    if not given:
        return entropy(p, target)
    return conditional_entropy_maps(p, _projection(target), _projection(given))


# ---------------------------------------------------------------------------
# Property suite
# ---------------------------------------------------------------------------

def _image_size(p: JointPmf, coords) -> int:
    return len(_grouped(p, _projection(coords)))


def _random_map(rng: np.random.Generator, values: list, codomain: int) -> Callable:
    table = {v: int(rng.integers(0, codomain)) for v in values}
    return lambda x: table[x]


def check_entropy_properties(p: JointPmf, trials: int = 3, seed: int = 0,
                             tol: float = ENTROPY_TOL) -> dict:
    """Verify the standard entropy toolbox on one pmf.

    Properties, over all applicable coordinate subsets: (1) image bound,
    (2) conditioning reduces entropy, (3) chain rule, (4) subadditivity given
    side information, (5) coarser conditioning increases conditional entropy
    (determined maps), (6) functions of the target add nothing, (7) triangle
    inequality.  Deterministic maps for (5)/(6) are coordinate projections,
    constants, and `trials` random seeded tables.
    """
    n = p.n_coords
    if n > 4:
        raise ValueError("property sweep is exhaustive over subsets; use <= 4 coordinates")
    idx = list(range(n))
    nonempty = [tuple(c) for r in range(1, n + 1) for c in itertools.combinations(idx, r)]
    failures = []
    checked = {k: 0 for k in ("image", "cond_reduces", "chain", "subadd", "coarsen", "function", "triangle")}
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    def record(prop, ok, witness):
        checked[prop] += 1
        if not ok:
            failures.append({"property": prop, "witness": witness})

    for xs in nonempty:
        record("image", entropy(p, xs) <= math.log2(max(1, _image_size(p, xs))) + tol, {"X": xs})

    for xs, ys in itertools.permutations(nonempty, 2):
        if set(xs) & set(ys):
            continue
        record("cond_reduces", conditional_entropy(p, xs, ys) <= entropy(p, xs) + tol, {"X": xs, "Y": ys})
        joint = entropy(p, xs + ys)
        record(
            "chain",
            abs(joint - entropy(p, xs) - conditional_entropy(p, ys, xs)) <= tol,
            {"X": xs, "Y": ys},
        )
        if len(xs) > 1:
            bound = sum(conditional_entropy(p, (i,), ys) for i in xs)
            record("subadd", conditional_entropy(p, xs, ys) <= bound + tol, {"X": xs, "Y": ys})

        # (5)/(6) with explicit deterministic maps of the conditioning block
    for xs, ys in itertools.permutations(nonempty, 2):
        if set(xs) & set(ys):
            continue
        proj_y = _projection(ys)
        y_values = sorted(_grouped(p, proj_y))
        maps = [lambda yv: 0]  # constant coarsening
        for sub in itertools.combinations(range(len(ys)), max(1, len(ys) - 1)):
            maps.append(lambda yv, sub=sub: tuple(yv[i] for i in sub))
        for _ in range(trials):
            maps.append(_random_map(rng, y_values, codomain=2))
        for fn in maps:
            z_fn = lambda outcome, fn=fn: fn(proj_y(outcome))
            lhs = conditional_entropy(p, xs, ys)
            rhs = conditional_entropy_maps(p, _projection(xs), z_fn)
            record("coarsen", lhs <= rhs + tol, {"X": xs, "Y": ys})

        proj_x = _projection(xs)
        x_values = sorted(_grouped(p, proj_x))
        fns = [lambda xv: 0, _random_map(rng, x_values, codomain=3)]
        for fn in fns:
            joint_fn = lambda outcome, fn=fn: (proj_x(outcome), fn(proj_x(outcome)))
            lhs = conditional_entropy_maps(p, joint_fn, proj_y)
            rhs = conditional_entropy(p, xs, ys)
            record("function", abs(lhs - rhs) <= tol, {"X": xs, "Y": ys})

    for xs, ys, zs in itertools.permutations(nonempty, 3):
        if set(xs) & set(ys) or set(xs) & set(zs) or set(ys) & set(zs):
            continue
        lhs = conditional_entropy(p, xs, zs)
        rhs = conditional_entropy(p, xs, ys) + conditional_entropy(p, ys, zs)
        record("triangle", lhs <= rhs + tol, {"X": xs, "Y": ys, "Z": zs})

    return {"checked": checked, "failures": failures, "ok": not failures}


# ---------------------------------------------------------------------------
# Fractional-cover subadditivity with ordered conditioning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverWeights:
    """Nonnegative weights on coordinate subsets forming a fractional cover,
    plus a strict partial order on coordinates used for conditioning."""

    sets: tuple[frozenset, ...]
    weights: tuple[float, ...]
    order: frozenset  # pairs (i, j) meaning i precedes j

    def __post_init__(self):
        if len(self.sets) != len(self.weights):
            raise ValueError("sets and weights must align")
        if any(not s for s in self.sets):
            raise ValueError("empty subsets are not allowed in a cover")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        for i, j in self.order:
            if i == j:
                raise ValueError("order must be irreflexive")
        pairs = set(self.order)
        for (a, b), (c, d) in itertools.product(pairs, repeat=2):
            if b == c and (a, d) not in pairs:
                raise ValueError(f"order is not transitive: ({a},{b}),({c},{d}) need ({a},{d})")

    def validate_for(self, n_coords: int, tol: float = 1e-9) -> None:
        for s in self.sets:
            if any(i < 0 or i >= n_coords for i in s):
                raise ValueError(f"subset {sorted(s)} out of range")
        for i, j in self.order:
            if not (0 <= i < n_coords and 0 <= j < n_coords):
                raise ValueError(f"order pair ({i},{j}) out of range")
        for i in range(n_coords):
            tot = sum(w for s, w in zip(self.sets, self.weights) if i in s)
            if abs(tot - 1.0) > tol:
                raise ValueError(f"coordinate {i} has cover weight {tot}, want 1")


def shearer_check(p: JointPmf, cw: CoverWeights, tol: float = ENTROPY_TOL) -> dict:
    """Total entropy versus the weighted sum of conditional block entropies.

    The right side conditions each block on the coordinates that precede all
    of it in the partial order; the inequality holds for every valid cover.
    """
    cw.validate_for(p.n_coords)
    lhs = entropy(p, range(p.n_coords))
    rhs = 0.0
    terms = []
    for s, w in zip(cw.sets, cw.weights):
        if w == 0:
            continue
        pred = tuple(i for i in range(p.n_coords) if all((i, a) in set(cw.order) for a in s))
        h = conditional_entropy(p, tuple(s), pred)
        rhs += w * h
        terms.append({"set": sorted(s), "weight": w, "given": pred, "term": h})
    return {"lhs": lhs, "rhs": rhs, "pass": lhs <= rhs + tol, "terms": terms}


# ---------------------------------------------------------------------------
# File format: {"supports": [[...], ...], "probs": [{"outcome": [...], "p": r}, ...]}
# ---------------------------------------------------------------------------

def save_pmf(p: JointPmf, path) -> None:
    payload = {
        "supports": [list(s) for s in p.supports],
        "probs": [{"outcome": list(o), "p": prob} for o, prob in sorted(p.probs.items())],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_pmf(path) -> JointPmf:
    with open(path) as fh:
        data = json.load(fh)
    supports = tuple(tuple(s) for s in data["supports"])
    probs = {tuple(row["outcome"]): float(row["p"]) for row in data["probs"]}
    return JointPmf(supports, probs)
