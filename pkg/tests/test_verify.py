import json

import numpy as np
import pytest

from sunn_reduction import ModelParams
from sunn_reduction.errors import ParameterError
from sunn_reduction.verify import BOUNDARY_EVERY, DEFAULT_TOLERANCES, REGISTRY, CheckResult, run_check, run_suite

DEFAULT = [ModelParams(2, 1.0, 0.3, 0.5), ModelParams(3, 1.0, 0.3, 0.5)]


@pytest.fixture(scope="module")
def report():
    return run_suite(DEFAULT, seed=42, sample_count=10)


def test_registry_shape():
    assert len(REGISTRY) >= 20
    for name, chk in REGISTRY.items():
        assert chk.name == name
        assert chk.anchor and chk.tolerance > 0
    assert set(DEFAULT_TOLERANCES) == set(REGISTRY)
    assert {DEFAULT_TOLERANCES[n] for n in ("omega_gram", "lax_explicit")} == {1e-10}
    assert DEFAULT_TOLERANCES["left_gram"] == 1e-9
    assert DEFAULT_TOLERANCES["involutivity"] == 1e-6


def test_default_suite_passes(report):
    assert report.passed, [(r.name, r.residual) for r in report.failures()]
    names = [r.name for r in report.results]
    assert names == sorted(names)
    assert len(report.results) == len(REGISTRY) * len(DEFAULT)
    for r in report.results:
        assert np.isfinite(r.residual)
        assert r.passed == (r.residual <= r.tolerance)


def test_boundary_fraction(report):
    sampled = [r for r in report.results if REGISTRY[r.name].uses_boundary]
    frac = sum(r.metadata["boundary_samples"] for r in sampled) / sum(r.metadata["samples"] for r in sampled)
    assert frac >= 0.1
    assert BOUNDARY_EVERY <= 10


def test_determinism(report):
    again = run_suite(DEFAULT, seed=42, sample_count=10)
    assert json.dumps(again.body(), sort_keys=True) == json.dumps(report.body(), sort_keys=True)
    threaded = run_suite(DEFAULT, seed=42, sample_count=10, workers=4)
    assert json.dumps(threaded.body(), sort_keys=True) == json.dumps(report.body(), sort_keys=True)


def test_seed_changes_samples():
    a = run_check("omega_gram", DEFAULT[0], 1, 5)
    b = run_check("omega_gram", DEFAULT[0], 2, 5)
    assert a.metadata["point"] != b.metadata["point"]


def test_tolerance_override_makes_failures_data():
    rep = run_suite(DEFAULT[:1], seed=0, sample_count=3, tolerances={"omega_gram": 0.0}, checks=["omega_gram", "kappa_diagonalization"])
    assert [r.name for r in rep.failures()] == ["omega_gram"]
    assert not rep.passed


def test_exception_in_check_is_recorded(monkeypatch):
    from sunn_reduction import verify

    def boom(params, rng, index):
        raise RuntimeError("broken identity")

    chk = REGISTRY["kappa_diagonalization"]
    monkeypatch.setitem(REGISTRY, "kappa_diagonalization", verify.Check(chk.name, chk.anchor, chk.tolerance, boom))
    res = run_check("kappa_diagonalization", DEFAULT[0], 0, 2)
    assert isinstance(res, CheckResult)
    assert not res.passed and res.residual == float("inf")
    assert "broken identity" in res.metadata["error"]


def test_invalid_inputs():
    with pytest.raises(ParameterError):
        run_suite([ModelParams(2, 1.0, 0.4, -0.4)], 0, 1)
    with pytest.raises(ValueError):
        run_suite([], 0, 1)
    with pytest.raises(KeyError):
        run_suite(DEFAULT, 0, 1, checks=["no_such_check"])
