"""Invariant suites and the direct-quadrature assembly oracle."""

from .oracle import OracleOperators, direct_operators, relative_error
from .suites import (
    MUTATIONS,
    SUITES,
    CheckResult,
    SuiteResult,
    VerifyContext,
    run_suites,
)

__all__ = [
    "OracleOperators",
    "direct_operators",
    "relative_error",
    "CheckResult",
    "SuiteResult",
    "VerifyContext",
    "SUITES",
    "MUTATIONS",
    "run_suites",
]
