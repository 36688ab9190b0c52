import time
from collections import OrderedDict

import numpy as np
import pytest

from jwclab.ball_geometry import basis_vector

CRITERIA = OrderedDict(
    [
        ("1", "dilation reproduction"),
        ("2", "sup formula consistency"),
        ("3", "Julia-type flow inequality"),
        ("4", "boundary suite, gamma = 1/4"),
        ("5", "sharpness negative control"),
        ("6", "gamma = 1/2 suite gate"),
        ("7", "flow correctness"),
        ("8", "Cauchy Jacobian accuracy"),
        ("9", "geometry property suite"),
        ("10", "admissibility bounds vs disk grid"),
    ]
)

_outcomes: dict[str, list[tuple[str, str, float]]] = {k: [] for k in CRITERIA}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion this test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _outcomes[str(marker.args[0])].append((item.name, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not any(_outcomes.values()):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, title in CRITERIA.items():
        runs = _outcomes[cid]
        if not runs:
            tr.write_line(f"criterion {cid:>2} ({title}): NOT RUN")
            continue
        failed = [name for name, out, _ in runs if out != "passed"]
        status = "PASS" if not failed else "FAIL"
        secs = sum(d for _, _, d in runs)
        line = f"criterion {cid:>2} ({title}): {status}  [{len(runs) - len(failed)}/{len(runs)} checks, {secs:.1f}s]"
        if failed:
            line += "  failing: " + ", ".join(failed)
        tr.write_line(line)


@pytest.fixture
def e1():
    return basis_vector(2, 1)


@pytest.fixture
def e2():
    return basis_vector(2, 2)


@pytest.fixture
def timer():
    class Timer:
        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.start

    return Timer


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
