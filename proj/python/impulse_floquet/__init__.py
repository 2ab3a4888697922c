"""Stability analysis of periodic planar Hamiltonian systems with impulse effects.

Systems are JSON descriptors, passed either as a dict, a JSON string, or a
path to a descriptor file. Results come back as plain dicts and lists.
"""

import json
import os

from . import _core
from ._core import DescriptorError, DomainError, GenerationError, IntegrationError, floquet_multipliers

__all__ = [
    "DescriptorError",
    "DomainError",
    "GenerationError",
    "IntegrationError",
    "analyze",
    "criteria",
    "disconjugacy",
    "floquet_multipliers",
    "generate",
    "load",
    "lyapunov_lhs",
    "lyapunov_sweep",
    "monodromy",
    "simulate",
    "soundness_sweep",
]


def _text(descriptor):
    if isinstance(descriptor, dict):
        return json.dumps(descriptor)
    if isinstance(descriptor, os.PathLike) or (
        isinstance(descriptor, str) and not descriptor.lstrip().startswith("{")
    ):
        with open(descriptor, encoding="utf-8") as fh:
            return fh.read()
    return descriptor


def load(descriptor):
    """Validated, normalized descriptor dict."""
    return json.loads(_core.validate(_text(descriptor)))


def analyze(descriptor, **tolerances):
    """Monodromy, multipliers, stability verdict and all seven criteria."""
    return json.loads(_core.analyze(_text(descriptor), **tolerances))


def monodromy(descriptor, **tolerances):
    return json.loads(_core.monodromy(_text(descriptor), **tolerances))


def criteria(descriptor, **tolerances):
    return json.loads(_core.criteria(_text(descriptor), **tolerances))


def lyapunov_lhs(descriptor, t1, t2, t0):
    return _core.lyapunov_lhs(_text(descriptor), t1, t2, t0)


def disconjugacy(descriptor, t1, t2):
    """Lyapunov-type test on [t1, t2] together with the brute-force oracle."""
    return json.loads(_core.disconjugacy(_text(descriptor), t1, t2))


def simulate(descriptor, periods, samples=32, x0=1.0, u0=0.0):
    """Rows (t, x, u, z, v, finite) over the given number of periods."""
    return _core.simulate(_text(descriptor), periods, samples, x0, u0)


def generate(mode="unconstrained", seed=0, margin=1e-3):
    """Random descriptor dict from the validation generator."""
    return json.loads(_core.generate(mode, seed, margin))


def soundness_sweep(mode, n, seed=0, margin=1e-3, workers=1, records=False):
    return json.loads(_core.soundness_sweep(mode, n, seed, margin, workers, records))


def lyapunov_sweep(n, seed=0, workers=1):
    return json.loads(_core.lyapunov_sweep(n, seed, workers))
