import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from psoacs.tsplib import TspInstance, load_bundled  # noqa: E402

settings.register_profile("default", deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def eil51():
    return load_bundled("eil51")


@pytest.fixture
def tiny():
    return TspInstance("tri", np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]))


def random_coords(n, seed, scale=100):
    rng = np.random.default_rng(seed)
    return [tuple(map(float, p)) for p in rng.integers(0, scale, size=(n, 2))]


def make_instance(coords, name="rand"):
    return TspInstance(name, np.array(coords, dtype=float))


def read_opt_tour(name):
    lines = (DATA / f"{name}.opt.tour").read_text().split("TOUR_SECTION")[1].split()
    return [int(t) - 1 for t in lines if t.lstrip("-").isdigit() and int(t) > 0]


# acceptance summary ---------------------------------------------------------

ACCEPTANCE: dict[int, list[tuple[str, bool]]] = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        ACCEPTANCE.setdefault(crit, []).append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[crit]
        ok = all(p for _, p in checks)
        names = ", ".join(f"{n}{'' if p else ' [FAIL]'}" for n, p in checks)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}  ({names})")
