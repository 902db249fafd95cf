"""Inference-serving interference simulator with online interference predictors."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
