"""Exact hitting times of the simple random walk and quantities derived from them.

For a fixed target v the hitting times solve

    h(v) = 0,    h(w) = 1 + (1/deg w) * sum_{u ~ w} h(u)    (w != v).

Multiplying each row by deg(w) gives the grounded Laplacian system
``(D - A)[V\\v, V\\v] h = deg[V\\v]``, which is what gets factorized
(LU with partial pivoting).  The residual is always reported on the
unscaled harmonic equation above.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
import scipy.linalg

from .errors import ParameterError, SolverError, UnreachableTargetError
from .graph import ErGraph, bfs_distances

NORMALIZATION_TOL = 1e-12


def residual_tolerance(n: int) -> float:
    return 1e-9 * n


@dataclass(frozen=True, eq=False)
class HittingVector:
    target: int
    values: np.ndarray
    residual: float

    def __getitem__(self, w):
        return self.values[w]


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    weights: np.ndarray


def stationary_distribution(g: ErGraph) -> StationaryDistribution:
    if g.edge_count == 0:
        raise ParameterError("stationary distribution undefined on an edgeless graph")
    w = g.stationary.copy()
    w.setflags(write=False)
    return StationaryDistribution(weights=w)


def harmonic_residual(g: ErGraph, v: int, h: np.ndarray) -> float:
    """max_{w != v} |h(w) - 1 - mean of h over neighbors of w|."""
    defect = h - 1.0 - (g.adjacency_float @ h) / g.degrees
    defect[v] = 0.0
    return float(np.abs(defect).max())


def _require_reachable(g: ErGraph, v: int) -> None:
    dist = bfs_distances(g, v)
    bad = np.flatnonzero(dist < 0)
    if bad.size:
        raise UnreachableTargetError(v, int(bad[0]))


def exact_hitting(g: ErGraph, v: int) -> HittingVector:
    """Expected first-arrival times at ``v`` from every vertex."""
    v = g.check_vertex(v)
    _require_reachable(g, v)
    keep = np.flatnonzero(np.arange(g.n) != v)
    deg = g.degrees[keep].astype(np.float64)
    lap = -g.adjacency_float[np.ix_(keep, keep)]
    lap[np.diag_indices_from(lap)] = deg

    with np.errstate(all="raise"):
        try:
            lu = scipy.linalg.lu_factor(lap, check_finite=False)
            x = scipy.linalg.lu_solve(lu, deg, check_finite=False)
        except (FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
            raise SolverError(f"grounded Laplacian solve for target {v} failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError(f"non-finite hitting times for target {v}")

    h = np.zeros(g.n)
    h[keep] = x
    tol = residual_tolerance(g.n)
    res = harmonic_residual(g, v, h)
    if res > tol:
        # one step of iterative refinement
        x = x + scipy.linalg.lu_solve(lu, deg - lap @ x, check_finite=False)
        h[keep] = x
        res = harmonic_residual(g, v, h)
        if res > tol:
            raise SolverError(f"residual {res:.3e} exceeds tolerance {tol:.3e} for target {v}")
    h.setflags(write=False)
    return HittingVector(target=v, values=h, residual=res)


def exact_hitting_all(g: ErGraph, targets: Sequence[int] | None = None, threads: int = 1) -> list[HittingVector]:
    """One independent solve per target; results in target order."""
    if targets is None:
        targets = range(g.n)
    targets = list(targets)
    if threads <= 1:
        return [exact_hitting(g, v) for v in targets]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: exact_hitting(g, t), targets))


def hitting_matrix(vectors: Sequence[HittingVector]) -> np.ndarray:
    """Stack per-target vectors into H with H[w, v] = H_{wv}."""
    return np.column_stack([hv.values for hv in vectors])


def hitting_from_measure(hv: HittingVector, mu) -> float:
    """H_{mu v} = sum_w mu(w) H_{wv}."""
    mu = np.asarray(mu, dtype=np.float64)
    if mu.shape != hv.values.shape:
        raise ParameterError(f"measure has shape {mu.shape}, expected {hv.values.shape}")
    if (mu < 0).any() or abs(mu.sum() - 1.0) > NORMALIZATION_TOL:
        raise ParameterError(f"mu is not a probability vector (sum={mu.sum()!r})")
    return float(mu @ hv.values)


@dataclass(frozen=True)
class NeighborAverage:
    value: float
    predicted: float
    defect: float


def neighbor_average(g: ErGraph, v: int, hv: HittingVector) -> NeighborAverage:
    """Average hitting time from the neighbors of v versus 2|E|/deg(v) - 1.

    The identity is exact on every connected graph, so ``defect`` measures
    only floating-point error.
    """
    v = g.check_vertex(v)
    if g.degrees[v] == 0:
        raise ParameterError(f"vertex {v} is isolated")
    value = float(hv.values[g.neighbors(v)].mean())
    predicted = float(2.0 * g.edge_count / g.degrees[v] - 1.0)
    return NeighborAverage(value=value, predicted=predicted, defect=abs(value - predicted))


def commute_time(g: ErGraph, v: int, w: int, hv_v: HittingVector | None = None,
                 hv_w: HittingVector | None = None) -> float:
    """H_{wv} + H_{vw}.  Precomputed hitting vectors to v and to w may be passed in."""
    v, w = g.check_vertex(v), g.check_vertex(w)
    if v == w:
        raise ParameterError("commute time needs two distinct vertices")
    hv_v = hv_v if hv_v is not None else exact_hitting(g, v)
    hv_w = hv_w if hv_w is not None else exact_hitting(g, w)
    if hv_v.target != v or hv_w.target != w:
        raise ParameterError("hitting vectors do not match the requested vertices")
    return float(hv_v.values[w] + hv_w.values[v])


def effective_resistance(g: ErGraph, v: int, w: int, hv_v: HittingVector | None = None,
                         hv_w: HittingVector | None = None) -> float:
    return commute_time(g, v, w, hv_v, hv_w) / (2.0 * g.edge_count)


def write_hitting_csv(hv: HittingVector, dest: str | os.PathLike | TextIO) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            write_hitting_csv(hv, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(["vertex", "hitting_time"])
    for w, h in enumerate(hv.values):
        writer.writerow([w, repr(float(h))])


def read_hitting_csv(src: str | os.PathLike | TextIO) -> np.ndarray:
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8", newline="") as fh:
            return read_hitting_csv(fh)
    reader = csv.DictReader(src)
    if reader.fieldnames != ["vertex", "hitting_time"]:
        raise ParameterError(f"unexpected header {reader.fieldnames}")
    rows = sorted((int(r["vertex"]), float(r["hitting_time"])) for r in reader)
    return np.array([h for _, h in rows])
