"""Constrained Hamiltonian engine for composite higher-derivative theories.

Phase states are packed as (qbar, q, pbar, p). Trajectories expose per-sample
arrays (t, qbar, q, pbar, p) plus H and constraint norms.
"""

from ._compham import *  # noqa: F401,F403
from ._compham import __doc__  # noqa: F401
