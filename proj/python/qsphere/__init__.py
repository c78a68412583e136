"""Quartic minimization on the unit sphere with a sign-uniform ground state."""

from ._qsphere import *  # noqa: F401,F403
from ._qsphere import __doc__  # noqa: F401
