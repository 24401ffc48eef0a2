"""Verification suites and their mutation hook."""

import pytest

from src.verification.suites import (
    MUTATIONS,
    SUITES,
    CheckResult,
    SuiteResult,
    VerifyContext,
    assembly_suite,
    basis_suite,
    geometry_suite,
    lemma_suite,
    run_suites,
)

pytestmark = pytest.mark.unit


def _describe(result: SuiteResult) -> str:
    return "; ".join(f"{c.name}={c.value:.3e} (limit {c.limit:.1e})" for c in result.failures)


def test_check_comparisons():
    assert CheckResult("a", 1e-13, 1e-12).passed
    assert not CheckResult("b", 1e-11, 1e-12).passed
    assert CheckResult("order", 2.01, 1.9, at_least=True).passed
    assert not CheckResult("order", 1.5, 1.9, at_least=True).passed
    assert not CheckResult("nan", float("nan"), 1.0).passed


def test_suite_result_summary():
    result = SuiteResult("demo")
    result.add("fine", 0.0, 1.0)
    result.add("broken", 2.0, 1.0)
    assert not result.passed
    assert [c.name for c in result.failures] == ["broken"]
    assert result.to_dict()["checks"][1]["comparison"] == "<="


def test_geometry_identities():
    result = geometry_suite(VerifyContext(geometry_samples=2000))
    assert result.passed, _describe(result)


def test_pressure_lemma_identities():
    result = lemma_suite(VerifyContext(lemma_samples=4))
    assert result.passed, _describe(result)
    assert result.info["samples"] == 4


def test_basis_properties():
    result = basis_suite(VerifyContext(basis_pairs=8))
    assert result.passed, _describe(result)
    assert result.info["n_pairs"] == 8


def test_assembly_matches_direct_quadrature():
    result = assembly_suite(VerifyContext())
    assert result.passed, _describe(result)


def test_sign_flip_mutation_is_detected():
    result = assembly_suite(VerifyContext(options=MUTATIONS["sign-flip"]))
    assert not result.passed
    failed = {c.name for c in result.failures}
    assert "C3 vs direct quadrature" in failed
    assert "M vs direct quadrature" not in failed


def test_seed_changes_samples_not_outcome():
    assert geometry_suite(VerifyContext(seed=7, geometry_samples=500)).passed


def test_run_suites_selects_by_name():
    results = run_suites(["geometry"], VerifyContext(geometry_samples=100))
    assert [r.suite for r in results] == ["geometry"]


def test_run_suites_rejects_unknown_names():
    with pytest.raises(KeyError):
        run_suites(["geometry", "nope"])


def test_registry_names():
    assert set(SUITES) == {"geometry", "lemma", "basis", "assembly", "energy"}
