"""Session-scoped fixtures for the production-scale runs shared across tests."""

import pytest

from gaugefrag import experiments

U1_PRODUCTION = {
    "model": "u1-ladder",
    "L": "4",
    "truncation": "4",
    "g": "0.6",
    "initial_state": "3,-2,3,-2",
}


@pytest.fixture(scope="session")
def u1_production_spectrum(tmp_path_factory):
    out = tmp_path_factory.mktemp("u1_spectrum")
    return experiments.run_u1_spectrum(dict(U1_PRODUCTION), out)


@pytest.fixture(scope="session")
def u1_production_quench(tmp_path_factory):
    out = tmp_path_factory.mktemp("u1_quench")
    cfg = dict(U1_PRODUCTION)
    cfg["observable"] = "electric-total"
    return experiments.run_quench(cfg, out)


@pytest.fixture(scope="session")
def su2_production_quenches(tmp_path_factory):
    results = {}
    for pairs in (1, 2, 3):
        out = tmp_path_factory.mktemp(f"su2_quench_{pairs}")
        cfg = {
            "model": "su2-matter",
            "N": "6",
            "g": "1.0",
            "m": "0.1",
            "initial_state": f"2,{pairs}",
        }
        results[pairs] = experiments.run_quench(cfg, out)
    return results
