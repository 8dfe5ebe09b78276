"""Top-level verification gate: every headline guarantee at full scale.

Each test runs one suite from :mod:`borelstein.acceptance` (the same code
the ``report`` command ships), asserts it passes at its stated tolerance,
checks its runtime budget, and prints a one-line verdict.
"""

import filecmp
import time

import pytest

from borelstein import acceptance
from borelstein.cli import main

SEED = 42

BUDGET_SECONDS = {
    "1": 5,
    "2": 30,
    "3": 60,
    "4": 60,
    "5": 1,
    "6": 120,
    "7": 120,
    "8": 180,
    "9": 60,
    "10": 600,
    "11": 120,
    "12": 10,
}


def _run(cid, fn):
    start = time.time()
    result = fn(seed=SEED, quick=False)
    elapsed = time.time() - start
    print(
        f"CRITERION {cid:>2s}: {result.status.upper()}  "
        f"observed={result.observed:.6g} threshold={result.threshold:.6g} "
        f"({elapsed:.1f}s)  {result.title}"
    )
    assert elapsed <= BUDGET_SECONDS[cid], f"criterion {cid} over budget: {elapsed:.1f}s"
    assert result.passed, (
        f"criterion {cid} failed: observed {result.observed!r} "
        f"exceeds threshold {result.threshold!r}"
    )
    return result


@pytest.mark.parametrize("cid,fn", acceptance.ALL_SUITES, ids=[c for c, _ in acceptance.ALL_SUITES])
def test_criterion(cid, fn):
    _run(cid, fn)


def test_criterion_13_reproducibility(tmp_path):
    """Same seed, same flags: byte-identical CSV bodies and summary."""
    start = time.time()
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    for target in (dir_a, dir_b):
        code = main(
            ["report", "--quick", "--seed", "42", "--out", str(target)]
        )
        assert code == 0
    names = sorted(p.name for p in dir_a.iterdir())
    assert names == sorted(p.name for p in dir_b.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(dir_a, dir_b, names, shallow=False)
    assert not mismatch and not errors
    elapsed = time.time() - start
    print(f"CRITERION 13: PASS  {len(names)} files byte-identical ({elapsed:.1f}s)")
    assert elapsed <= 300
