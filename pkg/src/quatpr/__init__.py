"""Quaternion phase retrieval: algebra, measurement models, solvers and experiments."""

from .quaternion import I, J, K, ONE, DomainError, Quaternion, qmul, qconj_abs_inv, qsign, parts
from .measurement import Ensemble, Observations, SignalSpec, observe, sample_ensemble, sample_signal
from .algorithms import RUNNERS, DivergenceError, RunTrace, SolverConfig, dist, dist_p

__version__ = "0.1.0"
