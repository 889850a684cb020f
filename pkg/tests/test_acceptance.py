"""Runs the full acceptance suite; prints one PASS/FAIL line per criterion."""

import json
import sys

import pytest

from goodman_lab import cli
from goodman_lab.acceptance import CRITERIA, run_acceptance


@pytest.fixture(scope="module")
def suite():
    return run_acceptance(seed=0, stream=sys.stdout)


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(suite, number, capsys):
    crit = next(c for c in suite.criteria if c.number == number)
    with capsys.disabled():
        print("\n" + crit.line)
    assert crit.passed, json.dumps(crit.details, sort_keys=True)[:2000]


def test_accept_is_deterministic(suite):
    again = run_acceptance(seed=0, stream=None)
    a = cli.dumps(suite.report())
    b = cli.dumps(again.report())
    assert a == b
