"""Spectral side of the random walk: normalized adjacency, mixing, quasi-stationarity.

B = D^{-1/2} A D^{-1/2} is similar to the transition matrix D^{-1} A, so the two
share eigenvalues; B is symmetric and gets a full dense eigendecomposition.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, ParameterError
from .graph import ErGraph
from .markov import HittingVector, hitting_from_measure

EIGEN_TOL = 1e-10


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    idx = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


@dataclass(frozen=True, eq=False)
class SpectralData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    lambda1_adjacency: float
    lambda2_adjacency: float
    perron_vector: np.ndarray

    @property
    def transition_lambda2(self) -> float:
        """Second-largest eigenvalue of the walk's transition matrix."""
        return float(self.eigenvalues[1])

    @property
    def spectral_radius_nontrivial(self) -> float:
        return float(max(abs(self.eigenvalues[1]), abs(self.eigenvalues[-1])))


def _require_degrees(g: ErGraph) -> None:
    if (g.degrees == 0).any():
        raise ParameterError(f"vertex {int(np.flatnonzero(g.degrees == 0)[0])} is isolated")


def normalized_adjacency(g: ErGraph) -> np.ndarray:
    _require_degrees(g)
    s = 1.0 / np.sqrt(g.degrees)
    return g.adjacency_float * np.outer(s, s)


def adjacency_extremes(g: ErGraph) -> tuple[float, float, np.ndarray]:
    """(lambda1(A), second-largest-|.| eigenvalue of A, unit Perron vector with positive sum)."""
    a = g.adjacency_float
    n = g.n
    if n == 1:
        return 0.0, 0.0, np.ones(1)
    top_vals, top_vecs = scipy.linalg.eigh(a, subset_by_index=[n - 2, n - 1])
    bottom = scipy.linalg.eigh(a, eigvals_only=True, subset_by_index=[0, 0])[0]
    lam1, second = top_vals[1], top_vals[0]
    if n == 2:
        # the only other eigenvalue is the bottom one
        second = bottom
    lam2 = second if abs(second) >= abs(bottom) else bottom
    phi = top_vecs[:, 1]
    if phi.sum() < 0:
        phi = -phi
    return float(lam1), float(lam2), phi


def eigen_b(g: ErGraph) -> SpectralData:
    """Full eigendecomposition of B, eigenvalues in descending order."""
    b = normalized_adjacency(g)
    vals, vecs = scipy.linalg.eigh(b)
    vals, vecs = vals[::-1].copy(), _fix_signs(vecs[:, ::-1])
    lam1, lam2, phi = adjacency_extremes(g)
    for arr in (vals, vecs, phi):
        arr.setflags(write=False)
    return SpectralData(vals, vecs, lam1, lam2, phi)


def lambda2_adjacency(g: ErGraph) -> float:
    """Eigenvalue of A with the second-largest absolute value (signed)."""
    return adjacency_extremes(g)[1]


def perron_deviation(g: ErGraph, spec: SpectralData | None = None) -> float:
    """max_i |phi_i - 1/sqrt(n)| for the unit Perron vector phi of A."""
    phi = spec.perron_vector if spec is not None else adjacency_extremes(g)[2]
    return float(np.abs(phi - 1.0 / math.sqrt(g.n)).max())


def spectral_hitting(g: ErGraph, v: int, spec: SpectralData) -> float:
    """H_{pi v} = (2|E|/deg v) * sum_{k>=2} u_k(v)^2 / (1 - lambda_k)."""
    v = g.check_vertex(v)
    if spec.eigenvalues[1] >= 1.0 - EIGEN_TOL:
        raise ParameterError("eigenvalue 1 is repeated; the graph is disconnected")
    u = spec.eigenvectors[v, 1:]
    return float(2.0 * g.edge_count / g.degrees[v] * np.sum(u**2 / (1.0 - spec.eigenvalues[1:])))


# -- mixing -------------------------------------------------------------------


@dataclass(frozen=True)
class WalkDistribution:
    origin: int
    steps: int
    mass: np.ndarray


def walk_distributions(g: ErGraph, v: int, k_max: int) -> list[WalkDistribution]:
    """mu_0 = delta_v, mu_{k+1} = mu_k D^{-1} A for k = 1..k_max."""
    v = g.check_vertex(v)
    _require_degrees(g)
    a = g.adjacency_float
    mu = np.zeros(g.n)
    mu[v] = 1.0
    out = []
    for k in range(1, k_max + 1):
        mu = (mu / g.degrees) @ a
        out.append(WalkDistribution(v, k, mu))
    return out


@dataclass(frozen=True)
class MixingRow:
    k: int
    l2: float
    l1: float
    weighted: float  # sqrt(sum (mu - pi)^2 / pi); contracts by the nontrivial spectral radius


def mixing_norms(g: ErGraph, v: int, k_max: int) -> list[MixingRow]:
    if k_max < 1:
        raise ParameterError("k_max must be >= 1")
    pi = g.stationary
    rows = []
    for wd in walk_distributions(g, v, k_max):
        diff = wd.mass - pi
        rows.append(
            MixingRow(
                k=wd.steps,
                l2=float(np.linalg.norm(diff)),
                l1=float(np.abs(diff).sum()),
                weighted=float(np.sqrt(np.sum(diff**2 / pi))),
            )
        )
    return rows


# -- contraction on mean-zero vectors -----------------------------------------


@dataclass(frozen=True)
class ContractionResult:
    max_ratio: float
    trials: int


def contraction_check(g: ErGraph, trials: int, seed: int) -> ContractionResult:
    """Largest ||x D^{-1} A|| / ||x|| over random mean-zero unit row vectors x."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    _require_degrees(g)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((trials, g.n))
    x -= x.mean(axis=1, keepdims=True)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = (x / g.degrees) @ g.adjacency_float
    ratios = np.linalg.norm(y, axis=1) / np.linalg.norm(x, axis=1)
    return ContractionResult(max_ratio=float(ratios.max()), trials=trials)


# -- quasi-stationary distribution ---------------------------------------------


@dataclass(frozen=True, eq=False)
class QuasiStationary:
    target: int
    lambda_v: float
    qsd: np.ndarray
    identity_defect: float
    iterations: int


def quasi_stationary(g: ErGraph, v: int, hv: HittingVector, tol: float = 1e-12,
                     max_iter: int = 100_000) -> QuasiStationary:
    """Perron pair of the transition matrix with row and column v removed.

    Power iteration runs on the lazy operator (I + Q)/2, which has the same
    eigenvectors and maps the Perron root r to (1 + r)/2; the shift removes any
    other eigenvalue of modulus r, so periodic chains still converge.
    """
    v = g.check_vertex(v)
    if g.n < 3:
        raise ParameterError("quasi-stationary distribution needs n >= 3")
    if hv.target != v:
        raise ParameterError("hitting vector does not belong to this target")
    _require_degrees(g)
    keep = np.flatnonzero(np.arange(g.n) != v)
    q = g.adjacency_float[np.ix_(keep, keep)] / g.degrees[keep, None]
    lazy = 0.5 * (np.eye(keep.size) + q)

    x = np.full(keep.size, 1.0 / keep.size)
    est = prev = None
    history = []
    for it in range(1, max_iter + 1):
        y = x @ lazy
        est = float(y.sum())
        y /= est
        step = float(np.abs(y - x).sum())
        x = y
        if prev is not None and abs(est - prev) < tol and step < tol:
            break
        prev = est
        history.append(est)
        if len(history) > 8:
            history.pop(0)
    else:
        d = np.diff(history)
        periodic = bool(d.size > 2 and np.all(d[1:] * d[:-1] < 0))
        raise ConvergenceError(
            f"power iteration for target {v} did not converge in {max_iter} iterations",
            iterations=max_iter,
            periodic=periodic,
        )

    lam = 2.0 * est - 1.0
    qsd = np.zeros(g.n)
    qsd[keep] = x / x.sum()
    qsd.setflags(write=False)
    defect = abs(hitting_from_measure(hv, qsd) - 1.0 / (1.0 - lam))
    return QuasiStationary(v, lam, qsd, defect, it)


# -- exports ------------------------------------------------------------------


def _open_or_pass(dest):
    if isinstance(dest, (str, os.PathLike)):
        return open(dest, "w", encoding="utf-8", newline="")
    return None


def write_spectrum_csv(spec: SpectralData, dest: str | os.PathLike | TextIO) -> None:
    fh = _open_or_pass(dest)
    out = fh or dest
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["k", "lambda"])
        for k, lam in enumerate(spec.eigenvalues, start=1):
            writer.writerow([k, repr(float(lam))])
    finally:
        if fh:
            fh.close()


def write_mixing_csv(rows: list[MixingRow], dest: str | os.PathLike | TextIO) -> None:
    fh = _open_or_pass(dest)
    out = fh or dest
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["k", "l1", "l2"])
        for r in rows:
            writer.writerow([r.k, repr(r.l1), repr(r.l2)])
    finally:
        if fh:
            fh.close()
