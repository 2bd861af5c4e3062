"""Fourier-domain empirical-null and nonnull-proportion estimation."""

from nullfreq._core import *  # noqa: F401,F403
from nullfreq._core import __version__  # noqa: F401
