"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``conftest.ACCEPTANCE_LINES`` and shown in the
terminal summary under "acceptance criteria".
"""

import functools
import math

import networkx as nx
import numpy as np
import pytest

from erhitting import graph as gr
from erhitting import markov, montecarlo, spectral, theory
from erhitting.experiments import ExperimentConfig, cmd_clt, cmd_scan

from .conftest import ACCEPTANCE_LINES
from .oracles import hitting_by_inversion, hitting_by_truncation


def record(number, title, passed, detail):
    ACCEPTANCE_LINES.append(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
    assert passed, f"criterion {number} ({title}) failed: {detail}"


# -- shared test matrices -------------------------------------------------------


@functools.lru_cache(maxsize=None)
def identity_matrix_graphs():
    """50 connected G(n, p) with n in 50..500 and p in {0.2, 0.5, 0.8}, plus fixtures.

    Each entry is (label, graph, targets). Random graphs get 5 sampled targets;
    fixtures use every vertex.
    """
    rng = np.random.default_rng(20240601)
    entries = []
    ps = (0.2, 0.5, 0.8)
    while len(entries) < 50:
        n = int(rng.integers(50, 501))
        p = ps[len(entries) % 3]
        g = gr.generate_er(n, p, int(rng.integers(2**63)))
        if not gr.is_connected(g):
            continue
        targets = tuple(int(v) for v in rng.choice(n, 5, replace=False))
        entries.append((f"G({n},{p})", g, targets))
    fixtures = [("K3", gr.complete_graph(3)), ("K7", gr.complete_graph(7)), ("K20", gr.complete_graph(20)),
                ("star6", gr.star_graph(6)), ("star12", gr.star_graph(12)),
                ("C5", gr.cycle_graph(5)), ("C8", gr.cycle_graph(8))]
    for label, g in fixtures:
        entries.append((label, g, tuple(range(g.n))))
    return entries


@functools.lru_cache(maxsize=None)
def identity_matrix_vectors():
    return [{v: markov.exact_hitting(g, v) for v in targets} for _, g, targets in identity_matrix_graphs()]


@functools.lru_cache(maxsize=None)
def qsd_matrix():
    """10 realizations of G(500, 0.5), 10 targets each, with solver vectors and spectra."""
    out = []
    for seed in range(10):
        g = gr.generate_er(500, 0.5, 1000 + seed)
        targets = np.random.default_rng(seed).choice(500, 10, replace=False)
        vectors = {int(v): markov.exact_hitting(g, int(v)) for v in targets}
        out.append((g, vectors, spectral.eigen_b(g)))
    return out


# -- criteria ---------------------------------------------------------------------


def test_criterion_01_neighbor_average_identity():
    worst = 0.0
    count = 0
    for (_, g, targets), vectors in zip(identity_matrix_graphs(), identity_matrix_vectors()):
        for v in targets:
            worst = max(worst, markov.neighbor_average(g, v, vectors[v]).defect)
            count += 1
    record(1, "neighbor-average identity", worst <= 1e-8,
           f"max defect {worst:.2e} over {count} targets (tol 1e-8)")


def test_criterion_02_quasi_stationary_identity():
    worst = 0.0
    for g, vectors, _ in qsd_matrix():
        for v, hv in vectors.items():
            worst = max(worst, spectral.quasi_stationary(g, v, hv).identity_defect)
    record(2, "quasi-stationary identity", worst <= 1e-6,
           f"max |H_qsd - 1/(1-lambda_v)| {worst:.2e} over 100 targets (tol 1e-6)")


def test_criterion_03_spectral_formula():
    worst = 0.0
    for g, vectors, spec in qsd_matrix():
        for v, hv in vectors.items():
            h_pi = markov.hitting_from_measure(hv, g.stationary)
            worst = max(worst, abs(spectral.spectral_hitting(g, v, spec) - h_pi) / h_pi)
    record(3, "spectral formula", worst <= 1e-6, f"max relative error {worst:.2e} (tol 1e-6)")


def test_criterion_04_concentration_envelope():
    cal = theory.calibrate_envelope()
    n = 2000
    scale = theory.envelope_scale(n)
    errors = []
    for seed in range(10):
        g = gr.generate_er(n, 0.5, 500 + seed)
        errors.append(theory.max_prediction_error(g, markov.exact_hitting(g, 0)))
    worst = max(errors) / scale
    passed = worst <= 2 * cal.constant
    record(4, "calibrated concentration at n=2000", passed,
           f"C={cal.constant:.3f}, max error {max(errors):.3f} steps, "
           f"normalized {worst:.3f} (fail above 2C={2 * cal.constant:.3f})")


@pytest.mark.parametrize("p,window", [(0.2, (4.5, 5.5)), (0.8, (1.1, 1.4))])
def test_criterion_05_cluster_gap(p, window):
    g = gr.generate_er(4000, p, 1)
    mean_a, mean_b = theory.cluster_means(g, markov.exact_hitting(g, 0))
    gap = mean_b - mean_a
    lo, hi = window
    record(5, f"cluster gap at G(4000,{p})", lo <= gap <= hi,
           f"gap {gap:.4f} in [{lo}, {hi}] (1/p = {1 / p:.3f})")


def test_criterion_06_error_scaling_slope():
    res = cmd_scan(ExperimentConfig(command="scan", p=0.5, grid=[250, 500, 1000, 2000], seeds=list(range(20))))
    slope = res.metadata["slope"]
    medians = [res.metadata["median_max_error"][str(n)] for n in (250, 500, 1000, 2000)]
    monotone = all(a > b for a, b in zip(medians, medians[1:]))
    lo, hi = -0.75, -0.25
    record(6, "error-scaling slope", slope is not None and lo <= slope <= hi and monotone,
           f"slope {slope:.3f} in [{lo}, {hi}], medians {', '.join(f'{m:.3f}' for m in medians)}"
           f"{'' if monotone else ' (not decreasing)'}")


def test_criterion_07_clt():
    res = cmd_clt(ExperimentConfig(command="clt", n=500, p=0.5, m=500, seeds=[7]))
    meta = res.metadata
    passed = (meta["ks_distance"] <= 0.08 and -0.2 <= meta["mean"] <= 0.2 and 0.8 <= meta["variance"] <= 1.2)
    record(7, "CLT for H_12", passed,
           f"KS {meta['ks_distance']:.4f} (<= 0.08), mean {meta['mean']:.3f}, variance {meta['variance']:.3f}, "
           f"{meta['samples']} samples")


def test_criterion_08_mixing():
    n = 1000
    g = gr.generate_er(n, 0.5, 8)
    worst_l2 = worst_l1 = 0.0
    for v in np.random.default_rng(8).choice(n, 10, replace=False):
        rows = spectral.mixing_norms(g, int(v), 3)
        worst_l2 = max(worst_l2, rows[0].l2)
        worst_l1 = max(worst_l1, rows[2].l1)
    b2, b1 = 5 / math.sqrt(n), 5 * math.log(n) / n
    record(8, "mixing after 1 and 3 steps", worst_l2 <= b2 and worst_l1 <= b1,
           f"max l2(k=1) {worst_l2:.4f} <= {b2:.4f}, max l1(k=3) {worst_l1:.4f} <= {b1:.4f}")


def test_criterion_09_contraction():
    n = 2000
    g = gr.generate_er(n, 0.5, 9)
    res = spectral.contraction_check(g, 50, seed=9)
    bound = 4 * math.sqrt(math.log(n) / n)
    record(9, "contraction on mean-zero vectors", res.max_ratio <= bound,
           f"max ratio {res.max_ratio:.4f} <= {bound:.4f}")


def test_criterion_10_bound_suites():
    worst_lovasz = worst_lt = -math.inf
    pairs = 0
    for (_, g, targets), vectors in zip(identity_matrix_graphs(), identity_matrix_vectors()):
        lam2 = spectral.eigen_b(g).transition_lambda2
        for v in targets:
            h_pi = markov.hitting_from_measure(vectors[v], g.stationary)
            worst_lt = max(worst_lt, theory.lowe_torres_lower_bound(g, v) - h_pi)
        for i, v in enumerate(targets):
            for w in targets[i + 1:]:
                kappa = markov.commute_time(g, v, w, vectors[v], vectors[w])
                b = theory.lovasz_bounds(g, v, w, lam2)
                worst_lovasz = max(worst_lovasz, b.lower - kappa, kappa - b.upper)
                pairs += 1
    passed = worst_lovasz <= 1e-9 and worst_lt <= 1e-9
    record(10, "Lovasz sandwich and Lowe-Torres bound", passed,
           f"worst violation {worst_lovasz:.2e} over {pairs} pairs, "
           f"lower bound {worst_lt:.2e} (slack 1e-9)")


def test_criterion_11_monte_carlo():
    g = gr.generate_er(500, 0.5, 11)
    rng = np.random.default_rng(11)
    trials = 20_000
    worst_z = 0.0
    cache = {}
    for _ in range(20):
        w, v = (int(x) for x in rng.choice(500, 2, replace=False))
        if v not in cache:
            cache[v] = markov.exact_hitting(g, v).values
        s = montecarlo.sample_hitting(g, w, v, trials, seed=11)
        worst_z = max(worst_z, abs(s.mean_hit - cache[v][w]) / s.stderr)
    v = 0
    dec = gr.decompose(g, v)
    worst_b = 0.0
    for w in np.concatenate([dec.set_a[:5], dec.set_b[:5]]):
        exact = theory.two_step_hit_prob(g, v, int(w)).within_two
        emp = montecarlo.empirical_two_step(g, int(w), v, trials, seed=11)
        worst_b = max(worst_b, abs(emp - exact) / math.sqrt(exact * (1 - exact) / trials))
    record(11, "Monte Carlo consistency", worst_z <= 4 and worst_b <= 4,
           f"max |z| hitting {worst_z:.2f} over 20 pairs, max two-step deviation {worst_b:.2f} se (<= 4)")


def test_criterion_12_oracle_equivalence():
    worst = worst_tail = 0.0
    graphs = 0

    def check(adj):
        nonlocal worst, worst_tail, graphs
        g = gr.ErGraph.from_adjacency(adj)
        for v in range(g.n):
            h = markov.exact_hitting(g, v).values
            trunc, tail = hitting_by_truncation(g.adjacency, v)
            worst = max(worst, np.abs(h - hitting_by_inversion(g.adjacency, v)).max(), np.abs(h - trunc).max())
            worst_tail = max(worst_tail, tail)
        graphs += 1

    # every connected graph on 2..7 vertices
    for G in nx.graph_atlas_g()[1:]:
        if G.number_of_nodes() >= 2 and nx.is_connected(G):
            check(nx.to_numpy_array(G, dtype=bool))
    exhaustive = graphs
    # sampled connected graphs on 8 vertices
    rng = np.random.default_rng(12)
    iu = np.triu_indices(8, k=1)
    while graphs - exhaustive < 10_000:
        adj = np.zeros((8, 8), dtype=bool)
        adj[iu] = rng.random(iu[0].size) < rng.uniform(0.2, 0.9)
        adj |= adj.T
        if gr.is_connected(gr.ErGraph.from_adjacency(adj)):
            check(adj)
    record(12, "oracle equivalence on small graphs", worst <= 1e-9 and worst_tail <= 1e-9,
           f"max deviation {worst:.2e} over {exhaustive} exhaustive + {graphs - exhaustive} sampled graphs, "
           f"truncation tail {worst_tail:.1e} (tol 1e-9)")
