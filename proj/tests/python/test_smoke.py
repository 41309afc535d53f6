import numpy as np
import pytest

import gcsieve

SM = np.array([[0, 0], [1, 0]], dtype=complex)  # |e> -> |g>, basis (|e>, |g>)
SZ = np.diag([1.0, -1.0]).astype(complex)


def test_purity_rate_of_damped_qubit():
    plus = np.array([1, 1]) / np.sqrt(2)
    # 2 (<L^dag L> - |<L>|^2) = 2 (1/2 - 1/4)
    assert gcsieve.purity_rate(SZ, [SM], plus) == pytest.approx(0.5, abs=1e-14)
    assert gcsieve.purity_rate(SZ, [SM], np.array([0, 1])) == pytest.approx(0.0, abs=1e-15)


def test_evolve_amplitude_damping():
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    out = gcsieve.evolve(SZ, [SM], rho0, [0.0, 1.0])
    assert len(out) == 2
    assert out[1][0, 0].real == pytest.approx(np.exp(-1.0), rel=1e-10)


def test_spin_coherent_state_attains_the_bound():
    up = np.array([1, 0, 0])
    assert gcsieve.invariant_uncertainty("su2-spinJ:J=1", up) == pytest.approx(1.0, abs=1e-12)
    assert gcsieve.gcs_infidelity("su2-spinJ:J=1", up) <= 1e-10
    assert gcsieve.gcs_infidelity("su2-spinJ:J=1", np.array([0, 1, 0])) == pytest.approx(0.5, abs=1e-6)


def test_sieve_finds_the_ground_state():
    report = gcsieve.sieve(SZ, [SM], n_starts=8, seed=3, rep="su2-spinJ:J=1/2")
    assert report["global_min_value"] <= 1e-12
    assert report["minimizers"][0]["gcs_infidelity"] <= 1e-10


def test_collective_decomposition():
    blocks = {b["j"]: b["multiplicity"] for b in gcsieve.decompose_collective(4)["blocks"]}
    assert blocks == {2.0: 1, 1.0: 3, 0.0: 2}


def test_scenario_verdict_and_errors():
    cfg = {
        "seed": 3,
        "J": 1,
        "lambda": [1, 0],
        "n_random": 50,
        "thresholds": {
            "ratio_rel": 1e-10,
            "min_value_rel": 1e-8,
            "gcs_infidelity": 1e-4,
            "counter_value": 1e-8,
            "counter_infidelity": 0.4,
        },
    }
    assert gcsieve.run_scenario("theorem3", cfg)["verdict"] == "PASS"
    del cfg["seed"]
    with pytest.raises(gcsieve.ConfigError):
        gcsieve.run_scenario("theorem3", cfg)
    assert issubclass(gcsieve.ConfigError, gcsieve.Error)
    with pytest.raises(gcsieve.Error):
        gcsieve.invariant_uncertainty("so3:J=1", np.array([1, 0, 0]))
