import io
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from erhitting import graph as gr
from erhitting import markov, spectral
from erhitting.errors import ConvergenceError, ParameterError

from .conftest import connected_graphs
from .oracles import transition_matrix


def check_spectral_invariants(g, spec):
    vals, vecs = spec.eigenvalues, spec.eigenvectors
    assert vals[0] == pytest.approx(1.0, abs=1e-10)
    assert (np.abs(vals) <= 1 + 1e-10).all()
    assert (np.diff(vals) <= 1e-12).all()
    assert np.linalg.norm(vecs.T @ vecs - np.eye(g.n)) <= 1e-8
    b = spectral.normalized_adjacency(g)
    assert (np.linalg.norm(b @ vecs - vecs * vals, axis=0) <= 1e-8).all()
    # sign convention
    idx = np.abs(vecs).argmax(axis=0)
    assert (vecs[idx, np.arange(g.n)] > 0).all()


def test_k4_spectrum(k4):
    spec = spectral.eigen_b(k4)
    np.testing.assert_allclose(spec.eigenvalues, [1, -1 / 3, -1 / 3, -1 / 3], atol=1e-12)
    check_spectral_invariants(k4, spec)


def test_single_edge_spectrum(edge):
    spec = spectral.eigen_b(edge)
    np.testing.assert_allclose(spec.eigenvalues, [1, -1], atol=1e-12)


def test_random_graph_spectrum():
    g = gr.generate_er(300, 0.3, 2)
    check_spectral_invariants(g, spectral.eigen_b(g))


@given(g=connected_graphs(min_n=2, max_n=12))
def test_spectral_invariants_small_graphs(g):
    check_spectral_invariants(g, spectral.eigen_b(g))


def test_second_eigenvalue_scaling(g1000):
    spec = spectral.eigen_b(g1000)
    assert spec.transition_lambda2 <= 5 / math.sqrt(1000)
    # same spectrum as the (non-symmetric) transition matrix
    p_vals = np.sort(np.linalg.eigvals(transition_matrix(g1000.adjacency)).real)[::-1]
    np.testing.assert_allclose(p_vals[:5], spec.eigenvalues[:5], atol=1e-8)


def test_isolated_vertex_rejected():
    with pytest.raises(ParameterError):
        spectral.eigen_b(gr.from_edges(3, [(0, 1)]))


def test_spectral_hitting_fixtures(k4, edge):
    assert spectral.spectral_hitting(k4, 0, spectral.eigen_b(k4)) == pytest.approx(2.25)
    assert spectral.spectral_hitting(edge, 0, spectral.eigen_b(edge)) == pytest.approx(0.5)


def test_spectral_hitting_matches_solver():
    g = gr.generate_er(500, 0.4, 21)
    spec = spectral.eigen_b(g)
    for v in np.random.default_rng(3).choice(500, 10, replace=False):
        v = int(v)
        h_pi = markov.hitting_from_measure(markov.exact_hitting(g, v), g.stationary)
        assert abs(spectral.spectral_hitting(g, v, spec) - h_pi) / h_pi <= 1e-6


@given(g=connected_graphs(min_n=2, max_n=10), data=st.data())
def test_spectral_hitting_small_graphs(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    h_pi = markov.hitting_from_measure(markov.exact_hitting(g, v), g.stationary)
    assert spectral.spectral_hitting(g, v, spectral.eigen_b(g)) == pytest.approx(h_pi, rel=1e-6)


def test_spectral_hitting_disconnected():
    g = gr.disjoint_union(gr.complete_graph(3), gr.complete_graph(3))
    with pytest.raises(ParameterError):
        spectral.spectral_hitting(g, 0, spectral.eigen_b(g))


def test_adjacency_extremes_complete_graph():
    g = gr.complete_graph(9)
    assert spectral.lambda2_adjacency(g) == pytest.approx(-1.0)
    spec = spectral.eigen_b(g)
    assert spec.lambda1_adjacency == pytest.approx(8.0)
    assert spectral.perron_deviation(g, spec) <= 1e-12


def test_adjacency_extremes_against_full_eigensolve():
    g = gr.generate_er(200, 0.5, 9)
    full = np.linalg.eigvalsh(g.adjacency_float)
    by_abs = full[np.argsort(-np.abs(full))]
    lam1, lam2, phi = spectral.adjacency_extremes(g)
    assert lam1 == pytest.approx(full[-1])
    assert lam2 == pytest.approx(by_abs[1])
    assert (phi > 0).all()
    assert np.linalg.norm(phi) == pytest.approx(1.0)


def test_adjacency_scaling_at_n1000(g1000):
    n = 1000
    spec = spectral.eigen_b(g1000)
    assert abs(spec.lambda2_adjacency) / math.sqrt(n) <= 3
    assert spectral.perron_deviation(g1000, spec) * n / math.sqrt(math.log(n)) <= 3


def test_walk_distributions_match_matrix_powers():
    g = gr.generate_er(60, 0.3, 1)
    P = transition_matrix(g.adjacency)
    for wd in spectral.walk_distributions(g, 4, 5):
        expected = np.linalg.matrix_power(P, wd.steps)[4]
        np.testing.assert_allclose(wd.mass, expected, atol=1e-14)
        assert abs(wd.mass.sum() - 1) <= 1e-12
        assert (wd.mass >= 0).all()


def test_mixing_single_edge(edge):
    rows = spectral.mixing_norms(edge, 0, 3)
    assert rows[0].k == 1
    assert rows[0].l1 == pytest.approx(1.0)
    assert rows[0].l2 == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ParameterError):
        spectral.mixing_norms(edge, 0, 0)


def test_mixing_bounds_at_n1000(g1000):
    n = 1000
    for v in (0, 10, 500):
        rows = spectral.mixing_norms(g1000, v, 3)
        assert rows[0].l2 <= 5 / math.sqrt(n)
        assert rows[2].l1 <= 5 * math.log(n) / n


@given(g=connected_graphs(min_n=3, max_n=12), data=st.data())
def test_weighted_distance_contracts(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    rho = spectral.eigen_b(g).spectral_radius_nontrivial
    rows = spectral.mixing_norms(g, v, 6)
    for a, b in zip(rows, rows[1:]):
        assert b.weighted <= a.weighted * rho + 1e-10


def test_contraction_complete_graph():
    g = gr.complete_graph(7)
    res = spectral.contraction_check(g, 20, seed=1)
    assert res.max_ratio == pytest.approx(1 / 6, abs=1e-12)
    assert spectral.contraction_check(gr.complete_graph(2), 3, 0).max_ratio == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        spectral.contraction_check(g, 0, 1)


def test_contraction_at_n2000(g2000):
    n = 2000
    res = spectral.contraction_check(g2000, 50, seed=7)
    assert res.max_ratio * math.sqrt(n / math.log(n)) <= 4


def test_quasi_stationary_k4(k4):
    qs = spectral.quasi_stationary(k4, 0, markov.exact_hitting(k4, 0))
    assert qs.lambda_v == pytest.approx(2 / 3, abs=1e-12)
    assert 1 / (1 - qs.lambda_v) == pytest.approx(3.0)
    np.testing.assert_allclose(qs.qsd, [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-12)
    assert qs.identity_defect <= 1e-9


def test_quasi_stationary_path(path3):
    qs = spectral.quasi_stationary(path3, 0, markov.exact_hitting(path3, 0))
    assert qs.lambda_v == pytest.approx(1 / math.sqrt(2), abs=1e-10)
    assert qs.identity_defect <= 1e-6


def test_quasi_stationary_random():
    g = gr.generate_er(500, 0.5, 13)
    for v in np.random.default_rng(1).choice(500, 10, replace=False):
        v = int(v)
        qs = spectral.quasi_stationary(g, v, markov.exact_hitting(g, v))
        assert 0 < qs.lambda_v < 1
        assert (qs.qsd >= 0).all() and abs(qs.qsd.sum() - 1) <= 1e-12
        assert qs.identity_defect <= 1e-6
        keep = [i for i in range(500) if i != v]
        Q = transition_matrix(g.adjacency)[np.ix_(keep, keep)]
        assert qs.lambda_v == pytest.approx(scipy.linalg.eigvals(Q).real.max(), abs=1e-10)


@given(g=connected_graphs(min_n=3, max_n=10), data=st.data())
def test_quasi_stationary_identity_small_graphs(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    qs = spectral.quasi_stationary(g, v, markov.exact_hitting(g, v))
    assert qs.identity_defect <= 1e-6


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_power_iteration_converges_on_reference_graphs(p):
    g = gr.generate_er(100, p, 42)
    for v in range(0, 100, 20):
        qs = spectral.quasi_stationary(g, v, markov.exact_hitting(g, v))
        assert qs.iterations < 1000


def test_quasi_stationary_errors(path3, edge):
    with pytest.raises(ConvergenceError) as exc:
        spectral.quasi_stationary(gr.path_graph(8), 0, markov.exact_hitting(gr.path_graph(8), 0), max_iter=3)
    assert exc.value.iterations == 3
    with pytest.raises(ParameterError):
        spectral.quasi_stationary(edge, 0, markov.exact_hitting(edge, 0))
    with pytest.raises(ParameterError):
        spectral.quasi_stationary(path3, 0, markov.exact_hitting(path3, 1))


def test_spectrum_csv_golden(k4):
    buf = io.StringIO()
    spectral.write_spectrum_csv(spectral.eigen_b(k4), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "k,lambda"
    ks = [int(line.split(",")[0]) for line in lines[1:]]
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert ks == [1, 2, 3, 4]
    assert vals == pytest.approx([1, -1 / 3, -1 / 3, -1 / 3], abs=1e-12)


def test_mixing_csv_golden(edge):
    buf = io.StringIO()
    spectral.write_mixing_csv(spectral.mixing_norms(edge, 0, 2), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "k,l1,l2"
    k1 = [float(x) for x in lines[1].split(",")]
    assert k1 == pytest.approx([1, 1.0, 1 / math.sqrt(2)])
