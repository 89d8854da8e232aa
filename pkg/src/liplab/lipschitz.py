"""Integer Lipschitz functions on graphs: validation, exact enumeration and
counting, exact sampling, single-site Glauber dynamics, and ground states.

Two ensembles are supported.  The one-point ensemble pins f(v0) = 0.  The
ground-state ensemble collects every M-Lipschitz function whose values leave
the window [k, k+M] on at most (2*lam/d)*n vertices; it is finite whenever
that flaw allowance is below n.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceededError
from .graphs import DEFAULT_NODE_BUDGET, Graph

_SLACK = 1e-12


@dataclass(frozen=True)
class LipschitzFn:
    """Integer labeling of the vertices whose edge differences are at most M."""

    values: tuple[int, ...]
    M: int

    def __post_init__(self):
        if self.M < 0:
            raise ValueError("M must be nonnegative")

    def shift(self, c: int) -> "LipschitzFn":
        return LipschitzFn(tuple(v + c for v in self.values), self.M)

    def reflect(self, k: int) -> "LipschitzFn":
        """The involution f -> -f + k + M pairing the ensembles based at k and 0."""
        return LipschitzFn(tuple(-v + k + self.M for v in self.values), self.M)


def validate(g: Graph, f: LipschitzFn) -> bool:
    """True iff |f(u) - f(v)| <= M across every edge."""
    if len(f.values) != g.n:
        raise ValueError(f"value array has length {len(f.values)}, graph has {g.n} vertices")
    vals = f.values
    for v in range(g.n):
        fv = vals[v]
        for u in g.neighbors(v):
            if u > v and abs(fv - vals[u]) > f.M:
                return False
    return True


def fn_range(f: LipschitzFn) -> int:
    """max f - min f + 1."""
    return max(f.values) - min(f.values) + 1


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble to draw from and with which sampling oracle."""

    mode: str  # "one-point" | "ground-state"
    M: int
    v0: int | None = None
    k: int | None = None
    lam: float | None = None
    oracle: str = "exact-enumeration"  # or "glauber"

    def __post_init__(self):
        if self.mode not in ("one-point", "ground-state"):
            raise ValueError(f"unknown ensemble mode {self.mode!r}")
        if self.oracle not in ("exact-enumeration", "glauber"):
            raise ValueError(f"unknown oracle {self.oracle!r}")
        if self.M < 0:
            raise ValueError("M must be nonnegative")
        if self.mode == "one-point" and self.v0 is None:
            raise ValueError("one-point mode requires v0")
        if self.mode == "ground-state" and (self.k is None or self.lam is None):
            raise ValueError("ground-state mode requires k and lam")


@dataclass(frozen=True)
class CountResult:
    count: int
    nodes_explored: int
    mode: str
    M: int
    anchor: int | None = None
    base: int | None = None
    flaw_cap: int | None = None
    box: tuple[int, int] | None = None


# ---------------------------------------------------------------------------
# Flaw-allowance arithmetic
# ---------------------------------------------------------------------------

def flaw_allowance_ok(count: int, n: int, d: int, lam) -> bool:
    """count <= (2*lam/d)*n, exactly when lam is rational, else with slack."""
    if isinstance(lam, (int, Fraction)):
        return Fraction(count) <= Fraction(2 * lam * n, d)
    return count <= 2.0 * lam / d * n + _SLACK


def flaw_cap(n: int, d: int, lam) -> int:
    """Largest admissible flaw count: floor of (2*lam/d)*n."""
    if isinstance(lam, (int, Fraction)):
        return int(Fraction(2 * lam * n, d))
    return int(math.floor(2.0 * lam / d * n + _SLACK))


# ---------------------------------------------------------------------------
# DFS enumeration engine
# ---------------------------------------------------------------------------

def _bfs_order(g: Graph, start: int) -> list[int]:
    order = [start]
    seen = bytearray(g.n)
    seen[start] = 1
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if not seen[u]:
                seen[u] = 1
                order.append(u)
                queue.append(u)
    return order


@dataclass
class _DfsPlan:
    """Vertex order plus per-position constraint data for the value DFS."""

    g: Graph
    order: list[int]
    earlier: list[list[int]]  # positions of already-assigned neighbors
    M: int
    root_values: Sequence[int]
    box: tuple[int, int] | None = None
    window: tuple[int, int] | None = None  # ground-state window
    cap: int | None = None  # max admissible flaws

    @classmethod
    def build(cls, g, start, M, root_values, box=None, window=None, cap=None):
        order = _bfs_order(g, start)
        pos = {v: i for i, v in enumerate(order)}
        earlier = [[pos[u] for u in g.neighbors(v) if pos[u] < i] for i, v in enumerate(order)]
        return cls(g, order, earlier, M, root_values, box, window, cap)

    def candidates(self, i: int, vals: list[int]) -> range:
        lo, hi = None, None
        for j in self.earlier[i]:
            w = vals[j]
            lo = w if lo is None or w > lo else lo
            hi = w if hi is None or w < hi else hi
        if lo is None:  # no assigned neighbors: only the root
            lo0, hi0 = min(self.root_values), max(self.root_values)
        else:
            lo0, hi0 = lo - self.M, hi + self.M
        if self.box is not None:
            lo0 = max(lo0, self.box[0])
            hi0 = min(hi0, self.box[1])
        return range(lo0, hi0 + 1)

    def is_flaw(self, value: int) -> bool:
        return self.window is not None and not (self.window[0] <= value <= self.window[1])

    def to_vertex_order(self, vals: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.g.n
        for i, v in enumerate(self.order):
            out[v] = vals[i]
        return tuple(out)


def _dfs_stream(plan: _DfsPlan, budget: int) -> Iterator[list[int]]:
    """Yield complete assignments (in plan order) in lexicographic order."""
    n = len(plan.order)
    vals = [0] * n
    nodes = 0

    def rec(i: int, flaws: int) -> Iterator[list[int]]:
        nonlocal nodes
        if i == n:
            yield vals
            return
        for c in (plan.root_values if i == 0 else plan.candidates(i, vals)):
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(nodes, budget, "function enumeration")
            nf = flaws + (1 if plan.is_flaw(c) else 0)
            if plan.cap is not None and nf > plan.cap:
                continue
            vals[i] = c
            yield from rec(i + 1, nf)

    yield from rec(0, 0)


def _dfs_count(plan: _DfsPlan, budget: int) -> tuple[int, int]:
    n = len(plan.order)
    vals = [0] * n
    nodes = 0

    def rec(i: int, flaws: int) -> int:
        nonlocal nodes
        if i == n:
            return 1
        total = 0
        for c in (plan.root_values if i == 0 else plan.candidates(i, vals)):
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(nodes, budget, "function counting")
            nf = flaws + (1 if plan.is_flaw(c) else 0)
            if plan.cap is not None and nf > plan.cap:
                continue
            vals[i] = c
            total += rec(i + 1, nf)
        return total

    total = rec(0, 0)
    return total, nodes


def _onepoint_plan(g: Graph, v0: int, M: int) -> _DfsPlan:
    if not (0 <= v0 < g.n):
        raise ValueError(f"invalid anchor vertex {v0}")
    return _DfsPlan.build(g, v0, M, root_values=(0,))


def enumerate_onepoint(g: Graph, v0: int, M: int, budget: int = DEFAULT_NODE_BUDGET) -> Iterator[LipschitzFn]:
    """Every f with f(v0) = 0, each exactly once, in lexicographic order
    along a breadth-first vertex order from v0."""
    plan = _onepoint_plan(g, v0, M)
    for vals in _dfs_stream(plan, budget):
        yield LipschitzFn(plan.to_vertex_order(vals), M)


def count_onepoint(g: Graph, v0: int, M: int, budget: int = DEFAULT_NODE_BUDGET) -> CountResult:
    plan = _onepoint_plan(g, v0, M)
    total, nodes = _dfs_count(plan, budget)
    return CountResult(count=total, nodes_explored=nodes, mode="one-point", M=M, anchor=v0)


def _groundstate_plan(g: Graph, k: int, M: int, lam) -> _DfsPlan:
    d = g.regular_degree()
    cap = flaw_cap(g.n, d, lam)
    if cap >= g.n:
        raise ValueError(
            f"flaw allowance {cap} admits every function (n={g.n}); the ensemble is infinite"
        )
    box = (k - g.n * M, k + M + g.n * M)
    return _DfsPlan.build(g, 0, M, root_values=range(box[0], box[1] + 1),
                          box=box, window=(k, k + M), cap=cap)


def enumerate_groundstate(g: Graph, k: int, M: int, lam, budget: int = DEFAULT_NODE_BUDGET) -> Iterator[LipschitzFn]:
    """Every M-Lipschitz f whose flaw count for the window [k, k+M] is within
    the allowance (2*lam/d)*n.  Values are confined to [k - n*M, k + M + n*M],
    which is exhaustive because some vertex must sit inside the window."""
    plan = _groundstate_plan(g, k, M, lam)
    for vals in _dfs_stream(plan, budget):
        yield LipschitzFn(plan.to_vertex_order(vals), M)


def count_groundstate(g: Graph, k: int, M: int, lam, budget: int = DEFAULT_NODE_BUDGET) -> CountResult:
    plan = _groundstate_plan(g, k, M, lam)
    total, nodes = _dfs_count(plan, budget)
    return CountResult(count=total, nodes_explored=nodes, mode="ground-state", M=M,
                       base=k, flaw_cap=plan.cap, box=plan.box)


# ---------------------------------------------------------------------------
# Exact sampling
# ---------------------------------------------------------------------------

def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound), exact even past 64-bit counts."""
    if bound <= 0:
        raise ValueError("empty choice")
    if bound <= (1 << 62):
        return int(rng.integers(0, bound))
    k = bound.bit_length()
    words = (k + 31) // 32
    while True:
        x = 0
        for w in rng.integers(0, 1 << 32, size=words, dtype=np.int64):
            x = (x << 32) | int(w)
        x >>= words * 32 - k
        if x < bound:
            return x


class ExactSampler:
    """Sequentially exact sampler: each vertex value is drawn proportional to
    the exact number of completions, so draws are uniform over the ensemble.

    Suffix counts are memoized on the frontier (assigned vertices that still
    have unassigned neighbors), which makes repeated draws cheap.
    """

    def __init__(self, g: Graph, spec: EnsembleSpec, budget: int = DEFAULT_NODE_BUDGET):
        self.g = g
        self.spec = spec
        self.budget = budget
        if spec.mode == "one-point":
            self.plan = _onepoint_plan(g, spec.v0, spec.M)
        else:
            self.plan = _groundstate_plan(g, spec.k, spec.M, spec.lam)
        n = len(self.plan.order)
        pos = {v: i for i, v in enumerate(self.plan.order)}
        # frontier[i]: positions < i still adjacent to the suffix
        self.frontier: list[tuple[int, ...]] = []
        for i in range(n + 1):
            live = []
            for j in range(i):
                w = self.plan.order[j]
                if any(pos[u] >= i for u in g.neighbors(w)):
                    live.append(j)
            self.frontier.append(tuple(live))
        self._memo: dict = {}
        self._nodes = 0
        self.total = self._suffix_count(0, [0] * n, 0)
        if self.total == 0:
            raise ValueError("ensemble is empty")

    def _suffix_count(self, i: int, vals: list[int], flaws: int) -> int:
        plan = self.plan
        n = len(plan.order)
        if i == n:
            return 1
        key = (i, tuple(vals[j] for j in self.frontier[i]), flaws)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        total = 0
        for c in (plan.root_values if i == 0 else plan.candidates(i, vals)):
            self._nodes += 1
            if self._nodes > self.budget:
                raise BudgetExceededError(self._nodes, self.budget, "sampler counting")
            nf = flaws + (1 if plan.is_flaw(c) else 0)
            if plan.cap is not None and nf > plan.cap:
                continue
            vals[i] = c
            total += self._suffix_count(i + 1, vals, nf)
        self._memo[key] = total
        return total

    def draw(self, rng: np.random.Generator) -> LipschitzFn:
        plan = self.plan
        n = len(plan.order)
        vals = [0] * n
        flaws = 0
        for i in range(n):
            weights = []
            cands = list(plan.root_values if i == 0 else plan.candidates(i, vals))
            for c in cands:
                nf = flaws + (1 if plan.is_flaw(c) else 0)
                if plan.cap is not None and nf > plan.cap:
                    weights.append(0)
                    continue
                vals[i] = c
                weights.append(self._suffix_count(i + 1, vals, nf))
            total = sum(weights)
            pick = _randbelow(rng, total)
            acc = 0
            for c, w in zip(cands, weights):
                acc += w
                if pick < acc:
                    vals[i] = c
                    flaws += 1 if plan.is_flaw(c) else 0
                    break
        return LipschitzFn(plan.to_vertex_order(vals), plan.M)


def sample_exact(g: Graph, spec: EnsembleSpec, seed: int, count: int = 1,
                 budget: int = DEFAULT_NODE_BUDGET) -> list[LipschitzFn]:
    """Draw `count` exactly-uniform samples; deterministic for a fixed seed."""
    sampler = ExactSampler(g, spec, budget=budget)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return [sampler.draw(rng) for _ in range(count)]


# ---------------------------------------------------------------------------
# Glauber dynamics
# ---------------------------------------------------------------------------

def glauber_site_interval(values: Sequence[int], nbrs: Sequence[int], M: int) -> tuple[int, int]:
    """Heat-bath interval at a site: [max_nbr - M, min_nbr + M]."""
    lo = max(values[u] for u in nbrs) - M
    hi = min(values[u] for u in nbrs) + M
    return lo, hi


def glauber_chain(
    g: Graph,
    spec: EnsembleSpec,
    seed: int,
    steps: int,
    initial: LipschitzFn | None = None,
    on_step: Callable[[int, list[int]], None] | None = None,
) -> LipschitzFn:
    """Single-site heat-bath chain whose stationary law is uniform.

    One-point mode resamples a uniform site v != v0 from its heat-bath
    interval.  Ground-state mode proposes the same move on any site and
    rejects proposals that would exceed the flaw allowance, which preserves
    uniformity because the proposal kernel is symmetric.  `on_step` sees the
    state after every step.
    """
    M = spec.M
    if spec.mode == "one-point":
        sites = [v for v in range(g.n) if v != spec.v0]
        values = [0] * g.n
        window = None
        cap = None
    else:
        d = g.regular_degree()
        cap = flaw_cap(g.n, d, spec.lam)
        if cap >= g.n:
            raise ValueError("flaw allowance admits every function; the ensemble is infinite")
        sites = list(range(g.n))
        values = [spec.k] * g.n
        window = (spec.k, spec.k + M)
    if initial is not None:
        if len(initial.values) != g.n or initial.M != M:
            raise ValueError("initial state does not match graph or M")
        if not validate(g, initial):
            raise ValueError("initial state is not Lipschitz")
        if spec.mode == "one-point" and initial.values[spec.v0] != 0:
            raise ValueError("initial state must anchor v0 at 0")
        values = list(initial.values)
    flaws = 0
    if window is not None:
        flaws = sum(1 for v in values if not (window[0] <= v <= window[1]))
        if flaws > cap:
            raise ValueError("initial state violates the flaw allowance")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    nbrs = g.adjacency
    n_sites = len(sites)
    chunk = 1 << 16
    done = 0
    while done < steps:
        take = min(chunk, steps - done)
        site_idx = rng.integers(0, n_sites, size=take)
        coins = rng.random(size=take)
        for t in range(take):
            v = sites[site_idx[t]]
            lo, hi = glauber_site_interval(values, nbrs[v], M)
            c = lo + int(coins[t] * (hi - lo + 1))
            if window is not None:
                old_in = window[0] <= values[v] <= window[1]
                new_in = window[0] <= c <= window[1]
                nf = flaws + (old_in and not new_in) - (not old_in and new_in)
                if nf > cap:
                    if on_step is not None:
                        on_step(done + t, values)
                    continue
                flaws = nf
            values[v] = c
            if on_step is not None:
                on_step(done + t, values)
        done += take
    return LipschitzFn(tuple(values), M)


# ---------------------------------------------------------------------------
# Ground states
# ---------------------------------------------------------------------------

def flaw_count(f: LipschitzFn, k: int) -> int:
    lo, hi = k, k + f.M
    return sum(1 for v in f.values if v < lo or v > hi)


def ground_states(g: Graph, f: LipschitzFn, lam) -> set[int]:
    """All window bases k whose flaw count is within the allowance.

    The search window [min f - M, max f] is complete: any other k leaves
    every vertex flawed, which qualifies only when the allowance is >= n
    (and then bases outside the occupied range carry no information).
    """
    d = g.regular_degree()
    lo, hi = min(f.values) - f.M, max(f.values)
    return {k for k in range(lo, hi + 1) if flaw_allowance_ok(flaw_count(f, k), g.n, d, lam)}


def min_ground_state(g: Graph, f: LipschitzFn, lam) -> int:
    """Smallest admissible window base; the admissible set must then fit in
    a window of M+1 consecutive bases whenever lam < d/4."""
    ks = ground_states(g, f, lam)
    if not ks:
        raise ValueError("no ground state found; the expansion certificate is likely invalid")
    kappa = min(ks)
    d = g.regular_degree()
    if lam < d / 4.0 and max(ks) > kappa + f.M:
        raise RuntimeError(
            f"admissible bases {sorted(ks)} exceed [{kappa}, {kappa + f.M}] despite lam < d/4; "
            "this indicates a bug"
        )
    return kappa


# ---------------------------------------------------------------------------
# File format: {"M": int, "values": [int; n]}
# ---------------------------------------------------------------------------

def save_function(f: LipschitzFn, path) -> None:
    with open(path, "w") as fh:
        json.dump({"M": f.M, "values": list(f.values)}, fh)
        fh.write("\n")


def load_function(path) -> LipschitzFn:
    with open(path) as fh:
        data = json.load(fh)
    return LipschitzFn(tuple(int(v) for v in data["values"]), int(data["M"]))
