"""Exact and predicted random-walk hitting times on Erdős–Rényi graphs."""

from .errors import (
    CapExceededError,
    ConvergenceError,
    DiameterError,
    ErHittingError,
    ParameterError,
    SolverError,
    UnreachableTargetError,
)
from .graph import ErGraph, decompose, degree_stats, generate_er, read_edgelist, write_edgelist
from .markov import (
    HittingVector,
    commute_time,
    effective_resistance,
    exact_hitting,
    exact_hitting_all,
    hitting_from_measure,
    neighbor_average,
)
from .montecarlo import empirical_two_step, sample_hitting
from .spectral import eigen_b, mixing_norms, quasi_stationary, spectral_hitting
from .theory import predict_hitting, predict_resistance, prediction

__version__ = "0.1.0"
