import time
from collections import defaultdict
from contextlib import contextmanager

import pytest

# criterion number -> list of (instance label, outcome, detail)
_RESULTS: dict[int, list[tuple[str, str, str]]] = defaultdict(list)
_TITLES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """
    ``with criterion(n, title, instance) as info:`` records one instance of
    acceptance criterion ``n``. Set ``info["detail"]`` to annotate the line.
    """

    @contextmanager
    def record(number: int, title: str, instance: str, expect_fail: bool = False):
        _TITLES[number] = title
        info = {"detail": ""}
        start = time.perf_counter()
        try:
            yield info
        except BaseException as exc:
            outcome = "XFAIL" if expect_fail else "FAIL"
            detail = info["detail"] or f"{type(exc).__name__}: {exc}".splitlines()[0]
            _RESULTS[number].append((instance, outcome, detail))
            print(f"[{outcome}] criterion {number} {instance}: {detail}")
            raise
        outcome = "XPASS" if expect_fail else "PASS"
        detail = info["detail"] or f"{time.perf_counter() - start:.3f} s"
        _RESULTS[number].append((instance, outcome, detail))
        print(f"[{outcome}] criterion {number} {instance}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for number in sorted(_RESULTS):
        rows = _RESULTS[number]
        failed = [r for r in rows if r[1] in ("FAIL", "XPASS")]
        xfailed = [r for r in rows if r[1] == "XFAIL"]
        passed = [r for r in rows if r[1] == "PASS"]
        status = "FAIL" if failed else "PASS"
        note = f"{len(passed)}/{len(passed) + len(failed)} instances"
        if xfailed:
            note += "; expected failures: " + "; ".join(f"{r[0]} ({r[2]})" for r in xfailed)
        if failed:
            note += "; failing: " + ", ".join(r[0] for r in failed)
        tr.write_line(f"{status}  {number}. {_TITLES[number]}: {note}")
