"""Bit commitment from coin tossing: Python bindings for the C++ core."""

import json

from ._ct2bc import (
    Ct2bcError,
    FrameError,
    ParameterError,
    ResourceGuardError,
    bits_required,
    gen,
    replay,
    run_local,
)
from . import _ct2bc

__all__ = [
    "Ct2bcError",
    "FrameError",
    "ParameterError",
    "ResourceGuardError",
    "abort_bias",
    "binding",
    "bits_required",
    "concealment",
    "gen",
    "replay",
    "run_local",
]


def binding(scheme, m, n=None, trials=1000, seed=0, threads=1):
    """Binding report as a dict (same fields as the CLI's JSON line)."""
    return json.loads(_ct2bc.binding_json(scheme, m, n, trials, seed, threads))


def concealment(scheme, m, n=None, trials=1000, seed=0, threads=1, exact=True):
    return json.loads(_ct2bc.concealment_json(scheme, m, n, trials, seed, threads, exact))


def abort_bias(tosses=10000, seed=0, retry_limit=0):
    return json.loads(_ct2bc.abort_bias_json(tosses, seed, retry_limit))
