"""Acceptance criteria C1-C9, each at its stated tolerance and runtime bound.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per criterion.
"""
import subprocess
import sys
import time

import pytest

from sobolevball.certify import CHECKS, format_result, run_checks

VERIFY_LIMIT = 300.0


@pytest.fixture(scope="module")
def desk_results():
    return {r.key: r for r in run_checks("desk")}


@pytest.mark.parametrize("key", sorted(CHECKS))
def test_criterion(key, desk_results):
    r = desk_results[key]
    print(format_result(r))
    assert r.passed, format_result(r)


def test_criterion_C9_cli_verify():
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "sobolevball", "verify", "--preset", "desk"],
                          capture_output=True, text=True, timeout=VERIFY_LIMIT + 60)
    elapsed = time.perf_counter() - t0
    ok = proc.returncode == 0 and elapsed < VERIFY_LIMIT
    print(f"C9 {'PASS' if ok else 'FAIL'} CLI verify --preset desk [{elapsed:.1f}s/{VERIFY_LIMIT:.0f}s] "
          f"exit={proc.returncode}")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert elapsed < VERIFY_LIMIT
