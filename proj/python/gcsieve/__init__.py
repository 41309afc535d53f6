"""Pointer-state search and generalized coherent states for Lindblad models."""

import json

import numpy as np

from ._core import (
    ConfigError,
    Error,
    decompose_collective_json,
    evolve,
    gcs_infidelity,
    invariant_uncertainty,
    purity_rate,
    run_scenario_json,
    sieve_json,
)

__all__ = [
    "ConfigError",
    "Error",
    "decompose_collective",
    "evolve",
    "gcs_infidelity",
    "invariant_uncertainty",
    "purity_rate",
    "run_scenario",
    "sieve",
]


def _ops(ops):
    return [np.asarray(op, dtype=complex) for op in ops]


def sieve(hamiltonian, lindblads, n_starts=16, seed=1, rep=""):
    """Multistart minimization of the purity-loss rate; returns the report as a dict."""
    h = np.asarray(hamiltonian, dtype=complex)
    return json.loads(sieve_json(h, _ops(lindblads), n_starts, seed, rep))


def decompose_collective(n_spins):
    return json.loads(decompose_collective_json(n_spins))


def run_scenario(scenario, config, threads=1):
    """Runs a named scenario from a config dict and returns its verdict."""
    return json.loads(run_scenario_json(scenario, json.dumps(config), threads))
