"""Gradient-type solvers for quaternion phase retrieval."""

from .gradients import (
    amplitude_loss,
    poisson_loglik,
    qtaf_gradient,
    qtwf_gradient,
    qtwf_keep_set,
    wf_gradient,
    wf_loss,
)
from .initialization import (
    EmptySelectionWarning,
    orthogonality_promoting_rows,
    qtaf_init,
    qtwf_init,
    spectral_init,
)
from .metrics import best_phase, dist, dist_p, relative_error
from .purification import drop_real, phase_factor_estimate, purify, sign_align
from .solvers import (
    PQWF_DEFAULTS,
    DivergenceError,
    RunTrace,
    SolverConfig,
    pqtaf_run,
    pqtwf_run,
    pqwf_drop_real,
    pqwf_run,
    pure_wrap,
    qtaf_run,
    qtwf_run,
    qwf_run,
    qwf_then_drop_real,
    qwf_then_purify,
)

RUNNERS = {
    "qwf": qwf_run,
    "qtwf": qtwf_run,
    "qtaf": qtaf_run,
    "pqwf": pqwf_run,
    "pqtwf": pqtwf_run,
    "pqtaf": pqtaf_run,
    "alg1": qwf_then_purify,
    "alg2": pqwf_drop_real,
    "alg3": qwf_then_drop_real,
}

__all__ = [name for name in dir() if not name.startswith("_")]
