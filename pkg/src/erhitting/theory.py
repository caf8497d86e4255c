"""Closed-form hitting-time predictions for G(n, p) and the diagnostics behind them.

For a target v and a start w != v the prediction is

    H_wv ~ 2|E|/deg(v) - 1          if w ~ v
    H_wv ~ 2|E|/deg(v) - 1 + 1/p    otherwise

with an error of order (log n)^{3/2} / sqrt(n).  No constant is known for
that error, so :func:`calibrate_envelope` fits one empirically.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DiameterError, ParameterError
from .graph import ErGraph, decompose, generate_er, is_connected
from .markov import HittingVector, exact_hitting


def envelope_scale(n: int) -> float:
    """(log n)^{3/2} / sqrt(n)."""
    return math.log(n) ** 1.5 / math.sqrt(n)


def _model_p(g: ErGraph, empirical_p: bool) -> float:
    return g.empirical_p if empirical_p else g.p


@dataclass(frozen=True)
class Prediction:
    base: float
    offset_adjacent: float
    offset_nonadjacent: float
    envelope: float

    def value(self, adjacent: bool) -> float:
        return self.base + (self.offset_adjacent if adjacent else self.offset_nonadjacent)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self))


def prediction(g: ErGraph, v: int, envelope_constant: float = 1.0, empirical_p: bool = False) -> Prediction:
    v = g.check_vertex(v)
    if g.degrees[v] == 0:
        raise ParameterError(f"vertex {v} is isolated")
    p = _model_p(g, empirical_p)
    return Prediction(
        base=float(2.0 * g.edge_count / g.degrees[v]),
        offset_adjacent=-1.0,
        offset_nonadjacent=-1.0 + 1.0 / p,
        envelope=envelope_constant * envelope_scale(g.n),
    )


def predict_hitting(g: ErGraph, v: int, w: int, empirical_p: bool = False) -> float:
    v, w = g.check_vertex(v), g.check_vertex(w)
    if v == w:
        raise ParameterError("prediction needs w != v")
    return prediction(g, v, empirical_p=empirical_p).value(g.has_edge(w, v))


def predict_hitting_vector(g: ErGraph, v: int, empirical_p: bool = False) -> np.ndarray:
    """Predictions for every start vertex; entry v is 0."""
    pred = prediction(g, v, empirical_p=empirical_p)
    adj = g.adjacency[v]
    out = np.where(adj, pred.value(True), pred.value(False))
    out[v] = 0.0
    return out


def predict_pi_hitting(g: ErGraph, v: int, empirical_p: bool = False) -> float:
    """Stationary-start hitting time implied by the two-cluster prediction: 2|E|/deg(v) - 3 + 1/p."""
    return prediction(g, v, empirical_p=empirical_p).base - 3.0 + 1.0 / _model_p(g, empirical_p)


def max_prediction_error(g: ErGraph, hv: HittingVector, empirical_p: bool = False) -> float:
    """max_{w != v} |H_wv - prediction(w)|."""
    err = np.abs(hv.values - predict_hitting_vector(g, hv.target, empirical_p))
    err[hv.target] = 0.0
    return float(err.max())


def predict_resistance(g: ErGraph, v: int, w: int, empirical_p: bool = False) -> float:
    v, w = g.check_vertex(v), g.check_vertex(w)
    if v == w:
        raise ParameterError("resistance needs two distinct vertices")
    if g.degrees[v] == 0 or g.degrees[w] == 0:
        raise ParameterError("resistance prediction needs positive degrees")
    p = _model_p(g, empirical_p)
    offset = -1.0 if g.has_edge(v, w) else -1.0 + 1.0 / p
    return float(1.0 / g.degrees[v] + 1.0 / g.degrees[w] + 2.0 / (g.n**2 * p) * offset)


@dataclass(frozen=True)
class LovaszBounds:
    lower: float
    upper: float


def lovasz_bounds(g: ErGraph, v: int, w: int, lambda2: float) -> LovaszBounds:
    """Commute-time bounds |E| s <= kappa <= 2|E| s / (1 - lambda2), s = 1/deg v + 1/deg w."""
    if not lambda2 < 1.0:
        raise ParameterError(f"lambda2 must be < 1, got {lambda2!r}")
    v, w = g.check_vertex(v), g.check_vertex(w)
    s = 1.0 / g.degrees[v] + 1.0 / g.degrees[w]
    return LovaszBounds(lower=float(g.edge_count * s), upper=float(2.0 * g.edge_count / (1.0 - lambda2) * s))


def lowe_torres_lower_bound(g: ErGraph, v: int) -> float:
    """H_{pi v} >= 2|E|/deg(v) - 2 on every connected graph."""
    return float(2.0 * g.edge_count / g.degrees[v] - 2.0)


@dataclass(frozen=True)
class TwoStepHit:
    """Probability of sitting on the target after exactly two steps.

    ``exact`` is the path through a neighbor of the target; ``direct`` is the
    probability 1/deg(w) of a first step straight onto it (zero unless w is
    adjacent to the target).  ``approx`` is |A| / (n^2 p).
    """

    exact: float
    approx: float
    direct: float

    @property
    def within_two(self) -> float:
        return self.exact + self.direct


def two_step_hit_prob(g: ErGraph, v: int, w: int) -> TwoStepHit:
    v, w = g.check_vertex(v), g.check_vertex(w)
    dec = decompose(g, v)
    adjacent = g.has_edge(w, v)
    if w == v or not (adjacent or w in set(dec.set_b.tolist())):
        raise ParameterError(f"vertex {w} is not at distance 1 or 2 from {v}")
    nbrs_a = dec.neighbors_in_a(g, w)
    deg_w = float(g.degrees[w])
    exact = float(np.sum(1.0 / g.degrees[nbrs_a])) / deg_w
    approx = dec.set_a.size / (g.n**2 * g.p)
    return TwoStepHit(exact=exact, approx=approx, direct=1.0 / deg_w if adjacent else 0.0)


@dataclass(frozen=True)
class CheapBound:
    max_dev: float
    normalized: float


def cheap_bound_check(g: ErGraph, all_hitting: Sequence[HittingVector]) -> CheapBound:
    """max over v != w of |H_wv - n|, raw and scaled by sqrt(n log n)."""
    targets = sorted(hv.target for hv in all_hitting)
    if targets != list(range(g.n)):
        raise ParameterError("cheap bound needs a hitting vector for every target")
    max_dev = 0.0
    for hv in all_hitting:
        dev = np.abs(hv.values - g.n)
        dev[hv.target] = 0.0
        max_dev = max(max_dev, float(dev.max()))
    return CheapBound(max_dev=max_dev, normalized=max_dev / math.sqrt(g.n * math.log(g.n)))


@dataclass(frozen=True)
class ConcentrationReport:
    target: int
    spread_a: float
    spread_b: float
    gap: float | None
    gap_defect: float | None
    b_empty: bool = False

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self))


def _spread(x: np.ndarray) -> float:
    return float(x.max() - x.min()) if x.size else 0.0


def concentration_report(g: ErGraph, v: int, hv: HittingVector, p_nominal: float) -> ConcentrationReport:
    """Spread of hitting times within A and within B and the B-minus-A gap."""
    v = g.check_vertex(v)
    if hv.target != v:
        raise ParameterError("hitting vector does not belong to this target")
    dec = decompose(g, v)
    if dec.beyond.size:
        raise DiameterError(f"vertex {int(dec.beyond[0])} is farther than 2 from target {v}")
    h_a = hv.values[dec.set_a]
    h_b = hv.values[dec.set_b]
    if h_b.size == 0:
        return ConcentrationReport(v, _spread(h_a), 0.0, None, None, b_empty=True)
    gap = float(h_b.mean() - h_a.mean())
    return ConcentrationReport(v, _spread(h_a), _spread(h_b), gap, abs(gap - 1.0 / p_nominal))


def cluster_means(g: ErGraph, hv: HittingVector) -> tuple[float, float]:
    """Mean hitting time over neighbors and over non-neighbors of the target."""
    adj = g.adjacency[hv.target].copy()
    non = ~adj
    non[hv.target] = False
    mean_non = float(hv.values[non].mean()) if non.any() else float("nan")
    return float(hv.values[adj].mean()), mean_non


@dataclass(frozen=True)
class Calibration:
    constant: float
    quantile: float
    samples: tuple[float, ...]
    skipped: int


def calibrate_envelope(
    n: int = 1000,
    ps: Iterable[float] = (0.2, 0.5, 0.8),
    seeds: Iterable[int] = range(20),
    target: int = 0,
    quantile: float = 0.99,
) -> Calibration:
    """Fit the envelope constant as a quantile of the normalized prediction error.

    Each realization contributes max_w |H_wv - prediction| / ((log n)^{3/2}/sqrt n)
    for the fixed ``target``; disconnected realizations are skipped and counted.
    """
    samples = []
    skipped = 0
    seeds = list(seeds)
    for p in ps:
        for s in seeds:
            g = generate_er(n, p, s)
            if not is_connected(g):
                skipped += 1
                continue
            hv = exact_hitting(g, target)
            samples.append(max_prediction_error(g, hv) / envelope_scale(n))
    if not samples:
        raise ParameterError("no connected realization in the calibration ensemble")
    return Calibration(
        constant=float(np.quantile(samples, quantile)),
        quantile=quantile,
        samples=tuple(samples),
        skipped=skipped,
    )
