"""Oscillating sticky Brownian motion.

Closed-form transition kernel and resolvent, joint laws of position, local
time and occupation time, path simulators and the verification suites of
the C++ library.
"""

import json

from ._osbm import (
    OsbmError,
    Params,
    first_passage_density,
    joint_density,
    killed_density,
    localtime_density,
    occupation_density,
    resolvent_atom,
    resolvent_density,
    simulate_path,
    simulate_terminal,
    sticky_factor,
    transition_atom,
    transition_cdf,
    transition_density,
    trivariate_density,
    verify_json,
)


def verify(suite="all", paths=50_000, pairs=20_000, dt=1e-3, seed=42):
    """Run a verification suite and return its report as a dict."""
    return json.loads(verify_json(suite, paths, pairs, dt, seed))


__all__ = [
    "OsbmError",
    "Params",
    "first_passage_density",
    "joint_density",
    "killed_density",
    "localtime_density",
    "occupation_density",
    "resolvent_atom",
    "resolvent_density",
    "simulate_path",
    "simulate_terminal",
    "sticky_factor",
    "transition_atom",
    "transition_cdf",
    "transition_density",
    "trivariate_density",
    "verify",
    "verify_json",
]
