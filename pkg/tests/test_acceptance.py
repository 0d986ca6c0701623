"""Acceptance gate: every criterion at its stated scale and time budget.

Each test prints one pass/fail line; the budgets are wall-clock ceilings
from the build contract.
"""

import pytest

from foamcalc.selftest import (
    suite_fb_cut_independence,
    suite_gamma_section,
    suite_k0,
    suite_move_soundness,
    suite_normalize,
    suite_quotient_square,
    suite_relations,
    suite_tau_prime,
)


def _gate(result, budget_seconds, minimum_checks):
    print(result.line())
    assert result.passed, result.detail
    assert result.checks >= minimum_checks, \
        f"{result.name}: only {result.checks} checks"
    assert result.seconds < budget_seconds, \
        f"{result.name}: {result.seconds:.1f}s over {budget_seconds}s budget"


def test_criterion_1_k0_suite():
    _gate(suite_k0(n=500), budget_seconds=5, minimum_checks=500)


def test_criterion_2_fb_cut_independence():
    _gate(suite_fb_cut_independence(n=300), budget_seconds=30, minimum_checks=300)


def test_criterion_3_move_soundness():
    _gate(suite_move_soundness(per_move=100), budget_seconds=120,
          minimum_checks=100 * 22)


def test_criterion_4_gamma_section():
    _gate(suite_gamma_section(n=100), budget_seconds=10, minimum_checks=200)


def test_criterion_5_normalization_oracle():
    _gate(suite_normalize(n=200), budget_seconds=300, minimum_checks=198)


def test_criterion_6_quotient_square():
    _gate(suite_quotient_square(n=200), budget_seconds=60, minimum_checks=200)


def test_criterion_7_defining_relations():
    _gate(suite_relations(), budget_seconds=10, minimum_checks=12)


def test_criterion_8_tau_prime_pinning():
    _gate(suite_tau_prime(n_zigzags=50), budget_seconds=5, minimum_checks=60)
