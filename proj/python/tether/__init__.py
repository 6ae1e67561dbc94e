"""Particle and continuum models of self-propelled particles among tethered obstacles."""

from ._tether import *  # noqa: F401,F403
from ._tether import __doc__  # noqa: F401

__version__ = "0.1.0"
