"""Expansion certificates for regular graphs and checks of their consequences.

Two certificates are supported: the spectral one (largest non-trivial
adjacency eigenvalue in absolute value, valid by the expander mixing lemma)
and the exhaustive one (the minimal feasible constant over every pair of
nonempty vertex subsets, only practical for small n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, ball, bfs_distances

EXHAUSTIVE_CAP = 14
_RESIDUAL_TOL = 1e-7


@dataclass(frozen=True)
class ExpanderProfile:
    """Expansion certificate (n, d, lam) for a regular graph."""

    n: int
    d: int
    lam: float
    method: str  # spectral | exhaustive | asserted

    def __post_init__(self):
        if self.method not in ("spectral", "exhaustive", "asserted"):
            raise ValueError(f"unknown certificate method {self.method!r}")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")

    def matches(self, g: Graph) -> bool:
        return self.n == g.n and g.is_regular() and g.regular_degree() == self.d


def asserted_profile(g: Graph, lam: float) -> ExpanderProfile:
    return ExpanderProfile(n=g.n, d=g.regular_degree(), lam=float(lam), method="asserted")


def diameter(g: Graph) -> int:
    """Exact diameter via all-source BFS."""
    best = 0
    for v in range(g.n):
        best = max(best, max(bfs_distances(g, v)))
    return best


def adjacency_spectrum(g: Graph) -> np.ndarray:
    """All adjacency eigenvalues (ascending), residual-checked."""
    a = g.adjacency_matrix()
    vals, vecs = np.linalg.eigh(a)
    scale = max(1.0, float(max(g.degrees)))
    resid = np.abs(a @ vecs - vecs * vals).max()
    if resid > _RESIDUAL_TOL * scale:
        raise RuntimeError(f"eigensolver residual {resid:.3e} exceeds {_RESIDUAL_TOL * scale:.3e}")
    return vals


def spectral_lambda(g: Graph) -> ExpanderProfile:
    """Certificate lam = max |eigenvalue| over the non-Perron adjacency spectrum."""
    d = g.regular_degree()
    vals = adjacency_spectrum(g)
    if g.n == 1:
        lam = 0.0
    else:
        # connected regular graph: drop the single top eigenvalue d
        lam = float(max(abs(vals[0]), abs(vals[-2])))
    return ExpanderProfile(n=g.n, d=d, lam=lam, method="spectral")


def _subset_matrix(n: int) -> np.ndarray:
    """Rows = indicator vectors of the 2^n - 1 nonempty subsets of [0, n)."""
    masks = np.arange(1, 1 << n, dtype=np.uint32)
    bits = (masks[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1
    return bits.astype(np.float64)


def _mask_to_set(mask: int) -> frozenset:
    return frozenset(i for i in range(32) if (mask >> i) & 1)


def exhaustive_lambda(g: Graph, cap: int = EXHAUSTIVE_CAP, block: int = 1024) -> ExpanderProfile:
    """Minimal feasible expansion constant via a sweep over all subset pairs.

    e(S,T) counts edges with one endpoint in each set, twice when both ends
    lie in the intersection; subset sizes and edge counts are exact integers
    (held in float64, exact below 2^53).
    """
    d = g.regular_degree()
    if g.n > cap:
        raise ValueError(f"exhaustive sweep capped at n={cap}, got n={g.n}")
    b = _subset_matrix(g.n)
    sizes = b.sum(axis=1)
    cross = g.adjacency_matrix() @ b.T  # column j = A 1_Tj
    ratio_d_n = d / g.n
    best = 0.0
    for lo in range(0, b.shape[0], block):
        rows = b[lo : lo + block]
        e = rows @ cross  # e(S,T), exact integers
        st = sizes[lo : lo + block, None] * sizes[None, :]
        dev = np.abs(e - ratio_d_n * st) / np.sqrt(st)
        best = max(best, float(dev.max()))
    return ExpanderProfile(n=g.n, d=d, lam=best, method="exhaustive")


def exhaustive_lambda_bruteforce(g: Graph) -> float:
    """Pure-Python oracle for the subset-pair sweep (tiny n only)."""
    d = g.regular_degree()
    n = g.n
    nbr = g.neighbor_sets
    subsets = []
    for mask in range(1, 1 << n):
        subsets.append([v for v in range(n) if (mask >> v) & 1])
    best = 0.0
    for s in subsets:
        s_set = set(s)
        for t in subsets:
            e = sum(len(nbr[v] & s_set) for v in t)
            val = abs(e - d * len(s) * len(t) / n) / math.sqrt(len(s) * len(t))
            best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# Consequence checks: joining edges, vertex expansion, volume growth, diameter
# ---------------------------------------------------------------------------

def _sampled_subsets(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    rows = rng.integers(0, 2, size=(count, n)).astype(np.float64)
    keep = rows.sum(axis=1) > 0
    rows = rows[keep]
    if len(rows) == 0:
        rows = np.ones((1, n))
    return rows


def verify_expander_props(
    g: Graph,
    profile: ExpanderProfile,
    cap: int = EXHAUSTIVE_CAP,
    sample_count: int = 2000,
    seed: int = 0,
    tol: float = 1e-9,
) -> dict:
    """Check the structural consequences of an expansion certificate.

    Returns a report with one entry per check: joining-edge (large subset
    pairs meet), vertex-expansion, volume-growth, diameter-bound.  Status is
    pass/fail for exhaustive sweeps, ``sampled`` for passing sampled sweeps
    on large graphs, ``skipped`` when a hypothesis gate fails.  A failure
    under an exhaustively certified lam indicates an implementation bug.
    """
    if not profile.matches(g):
        raise ValueError("profile does not match graph")
    n, d, lam = g.n, profile.d, profile.lam
    exhaustive = n <= cap
    checks = []

    if exhaustive:
        b = _subset_matrix(n)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        b = _sampled_subsets(n, sample_count, rng)
    sizes = b.sum(axis=1)
    ok_status = "pass" if exhaustive else "sampled"

    # (1) joining edge: |A||B| > (lam*n/d)^2 forces e(A,B) >= 1
    threshold = (lam * n / d) ** 2
    cross = g.adjacency_matrix() @ b.T
    witness = None
    worst = None
    for lo in range(0, b.shape[0], 1024):
        rows = b[lo : lo + 1024]
        e = rows @ cross
        st = sizes[lo : lo + 1024, None] * sizes[None, :]
        bad = (e < 0.5) & (st > threshold + tol)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            witness = {
                "S": sorted(_mask_to_set(lo + int(i) + 1)) if exhaustive else sorted(np.flatnonzero(rows[i]).tolist()),
                "T": sorted(_mask_to_set(int(j) + 1)) if exhaustive else sorted(np.flatnonzero(b[j]).tolist()),
                "product": float(st[i, j]),
                "threshold": threshold,
            }
            break
        zero = st[e < 0.5]
        if zero.size:
            m = float(zero.max())
            worst = m if worst is None else max(worst, m)
    checks.append(
        {
            "name": "joining-edge",
            "status": "fail" if witness else ok_status,
            "witness": witness,
            "details": {"threshold": threshold, "max_product_without_edge": worst},
        }
    )

    # (2) vertex expansion: |N(A)|/|A| >= (d/lam * (1 - |N(A)|/n))^2
    if lam == 0:
        checks.append({"name": "vertex-expansion", "status": "skipped", "witness": None, "details": {"reason": "lam = 0"}})
    else:
        nb_sizes = ((b @ g.adjacency_matrix()) > 0.5).sum(axis=1).astype(np.float64)
        lhs = nb_sizes / sizes
        rhs = ((d / lam) * (1.0 - nb_sizes / n)) ** 2
        bad = lhs < rhs - tol
        witness = None
        if bad.any():
            i = int(np.argmax(bad))
            witness = {"A": sorted(np.flatnonzero(b[i]).astype(int).tolist()), "ratio": float(lhs[i]), "bound": float(rhs[i])}
        checks.append({"name": "vertex-expansion", "status": "fail" if witness else ok_status, "witness": witness, "details": {}})

    # (3) volume growth: |B(v,t)| >= min(n/2, (d/2lam)^(2t))
    witness = None
    diam = diameter(g)
    if lam == 0:
        checks.append({"name": "volume-growth", "status": "skipped", "witness": None, "details": {"reason": "lam = 0"}})
    else:
        growth = d / (2.0 * lam)
        for v in range(n):
            dist = bfs_distances(g, v)
            for t in range(diam + 1):
                size = sum(1 for x in dist if 0 <= x <= t)
                bound = min(n / 2.0, growth ** (2 * t))
                if size < bound - tol:
                    witness = {"v": v, "t": t, "ball": size, "bound": bound}
                    break
            if witness:
                break
        checks.append({"name": "volume-growth", "status": "fail" if witness else "pass", "witness": witness, "details": {}})

    # (4) diameter bound, hypothesis lam < d/2
    if lam >= d / 2.0 or lam == 0:
        checks.append(
            {
                "name": "diameter-bound",
                "status": "skipped",
                "witness": None,
                "details": {"reason": f"hypothesis lam < d/2 fails (lam={lam}, d={d})" if lam else "lam = 0"},
            }
        )
    else:
        bound = math.log(n) / math.log(d / (2.0 * lam))
        ok = diam <= bound + tol
        checks.append(
            {
                "name": "diameter-bound",
                "status": "pass" if ok else "fail",
                "witness": None if ok else {"diameter": diam, "bound": bound},
                "details": {"diameter": diam, "bound": bound},
            }
        )

    return {
        "graph": g.name,
        "n": n,
        "d": d,
        "lam": lam,
        "method": profile.method,
        "mode": "exhaustive" if exhaustive else "sampled",
        "checks": checks,
        "all_ok": all(c["status"] != "fail" for c in checks),
    }
