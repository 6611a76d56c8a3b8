import numpy as np

from quatpr.measurement import SignalSpec, observe, sample_ensemble, sample_signal


def problem(seed, d, n, kind="general"):
    """Ensemble, signal and observations drawn from one seed."""
    E = sample_ensemble(n, d, seed)
    x = sample_signal(SignalSpec(d, kind, seed))
    return E, x, observe(E, x)


def unit(z):
    return z / np.linalg.norm(z)
