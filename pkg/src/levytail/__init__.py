"""Explicit small-time tail bounds for Levy processes, with validation tools.

The package computes non-asymptotic bounds on P(|X_t| >= eps) and on the
small-jump martingale tail P(|M_t(eps)| >= eps) for pure-jump Levy processes
whose jump density is dominated by a stable-type envelope near the origin,
and ships the machinery to validate those bounds against closed forms and
Monte Carlo simulation.
"""

from . import bounds, closed_forms, errors, harness, levy_model, simulate
from .bounds import BoundResult, auto_select, constants
from .closed_forms import ExactTail
from .errors import ConfigError, LevyTailError, NoApplicableBound, NumericError
from .levy_model import FunctionalValue, LevyModel, parse_model

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "closed_forms",
    "errors",
    "harness",
    "levy_model",
    "simulate",
    "BoundResult",
    "auto_select",
    "constants",
    "ExactTail",
    "ConfigError",
    "LevyTailError",
    "NoApplicableBound",
    "NumericError",
    "FunctionalValue",
    "LevyModel",
    "parse_model",
    "__version__",
]
