"""Python bindings for the rankstab C++ core.

Quantifies how a binary classifier's predictive accuracy (F1) relates to the
quality of its feature-importance interpretations, via rank-stability (WKT10)
and trueness-bound (pMode) metrics over subsample/bootstrap sweeps.
"""

from rankstab._core import *  # noqa: F401,F403
from rankstab._core import __version__  # noqa: F401
