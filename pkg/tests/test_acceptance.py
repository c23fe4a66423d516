"""Acceptance criteria 1-12, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v -s`` (the lines are also
collected into the terminal summary) or as a script:
``python3 tests/test_acceptance.py``.

Two criteria are known not to hold as stated and are strict xfails: they
still run in full and print FAIL, and they turn into errors if they ever
start passing.
"""

import os
import sys
import time

import pytest

from intfam import verify

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # script mode
    ACCEPTANCE_LINES = []

# seconds allowed per criterion; searches get their full stated budget
LIMITS = {1: 10, 2: 10, 3: 1, 4: 10, 5: 60, 6: 300, 7: 120, 8: 600, 9: 900, 10: 3600, 11: 120, 12: 60}
MAIN10_SECONDS = float(os.environ.get("INTFAM_MAIN10_SECONDS", LIMITS[10]))

CHECKS = {
    1: lambda: verify.check_formulas(),
    2: lambda: verify.check_golden(),
    3: lambda: verify.check_crossover(),
    4: lambda: verify.check_trace_collapse(),
    5: lambda: verify.check_shifting(1000, seed=0),
    6: lambda: verify.check_guarded(200, seed=0),
    7: lambda: verify.check_oracle(),
    8: lambda: verify.check_classical(9, 4, LIMITS[8]),
    9: lambda: verify.check_main_small(LIMITS[9]),
    10: lambda: verify.check_main_large(MAIN10_SECONDS),
    11: lambda: verify.check_separability(),
    12: lambda: verify.check_degree_claims(500, seed=0),
}

KNOWN_FAILURES = {
    6: "K2 misses the missing-degree floor the guarded procedure requires",
    9: "a third 50-member class (two exceptions meeting in one element) is optimal at (9,4)",
}


def run_criterion(number: int):
    start = time.perf_counter()
    check = CHECKS[number]()
    elapsed = time.perf_counter() - start
    ok = check.ok and elapsed <= LIMITS[number]
    verdict = "PASS" if ok else "FAIL"
    line = (f"criterion {number:>2}: {verdict}  expected [{check.expected}]  observed [{check.observed}]  "
            f"{elapsed:.1f}s (limit {LIMITS[number]}s)")
    print(line, flush=True)
    for d in check.details[:5]:
        print(f"    {d}", flush=True)
    ACCEPTANCE_LINES.append(line)
    return ok, check, elapsed


def _param(n):
    if n in KNOWN_FAILURES:
        return pytest.param(n, marks=pytest.mark.xfail(strict=True, reason=KNOWN_FAILURES[n]))
    return n


@pytest.mark.parametrize("number", [_param(n) for n in sorted(CHECKS)])
def test_criterion(number):
    ok, check, elapsed = run_criterion(number)
    assert check.ok, check.details[:5]
    assert elapsed <= LIMITS[number], f"took {elapsed:.1f}s"


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or sorted(CHECKS)
    results = [run_criterion(n)[0] for n in wanted]
    sys.exit(0 if all(results) else 1)
