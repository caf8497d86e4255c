"""Direct simulation of the simple random walk, used as an independent check.

Randomness is counter-based: trial ``t`` of a call keyed by
``(seed, origin, target)`` owns the SplitMix64 stream seeded with
a hash of ``(key, t)``, and its s-th step consumes output s of that stream.
Any trial can therefore be replayed alone, and the whole batch is simulated
in lock-step with numpy without the results depending on the batching.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, ParameterError
from .graph import ErGraph
from .markov import _require_reachable

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix_int(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, origin: int, target: int) -> int:
    return _mix_int(_mix_int(_mix_int(seed & _MASK) ^ origin) ^ target)


def trial_keys(key: int, trials: int) -> np.ndarray:
    with np.errstate(over="ignore"):
        t = np.arange(trials, dtype=np.uint64) + np.uint64(_GOLDEN)
        return _finalize(np.uint64(key) ^ _finalize(t))


def uniforms(keys: np.ndarray, step: int) -> np.ndarray:
    """Output number ``step`` (0-based) of each SplitMix64 stream, mapped to [0, 1)."""
    with np.errstate(over="ignore"):
        state = keys + np.uint64(((step + 1) * _GOLDEN) & _MASK)
        return (_finalize(state) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def default_cap(n: int) -> int:
    return math.ceil(100 * n * math.log(n))


@dataclass(frozen=True)
class WalkSample:
    origin: int
    target: int
    trials: int
    mean_hit: float
    stderr: float
    hit_within_2: float
    seed: int

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self))


def simulate_hitting_times(g: ErGraph, w: int, v: int, trials: int, seed: int,
                           cap: int | None = None) -> np.ndarray:
    """First-arrival times at v for ``trials`` independent walks from w."""
    w, v = g.check_vertex(w), g.check_vertex(v)
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    _require_reachable(g, v)
    cap = default_cap(g.n) if cap is None else int(cap)
    times = np.zeros(trials, dtype=np.int64)
    if w == v:
        return times
    table = g.neighbor_table
    deg = g.degrees
    keys = trial_keys(stream_key(seed, w, v), trials)
    active = np.arange(trials)
    pos = np.full(trials, w, dtype=np.int64)
    step = 0
    while active.size:
        if step >= cap:
            raise CapExceededError(
                f"{active.size} of {trials} walks from {w} had not reached {v} after {cap} steps"
            )
        u = uniforms(keys[active], step)
        pos = table[pos, (u * deg[pos]).astype(np.int64)]
        step += 1
        hit = pos == v
        times[active[hit]] = step
        active = active[~hit]
        pos = pos[~hit]
    return times


def sample_hitting(g: ErGraph, w: int, v: int, trials: int, seed: int, cap: int | None = None) -> WalkSample:
    times = simulate_hitting_times(g, w, v, trials, seed, cap)
    # integer sum is exact, so the mean does not depend on summation order
    mean = int(times.sum()) / trials
    stderr = float(times.std(ddof=1)) / math.sqrt(trials) if trials > 1 else 0.0
    return WalkSample(
        origin=int(w),
        target=int(v),
        trials=int(trials),
        mean_hit=float(mean),
        stderr=stderr,
        hit_within_2=float(np.count_nonzero(times <= 2)) / trials if w != v else 1.0,
        seed=int(seed),
    )


def empirical_two_step(g: ErGraph, w: int, v: int, trials: int, seed: int) -> float:
    """Fraction of walks from w that stand on v at step 1 or step 2."""
    w, v = g.check_vertex(w), g.check_vertex(v)
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if (g.degrees == 0).any():
        raise ParameterError("walk undefined on a graph with isolated vertices")
    table = g.neighbor_table
    deg = g.degrees
    keys = trial_keys(stream_key(seed, w, v), trials)
    pos = np.full(trials, w, dtype=np.int64)
    hit = np.zeros(trials, dtype=bool)
    for step in range(2):
        pos = table[pos, (uniforms(keys, step) * deg[pos]).astype(np.int64)]
        hit |= pos == v
    return float(np.count_nonzero(hit)) / trials
