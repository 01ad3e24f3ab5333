import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gromovkit import FiniteMetricSpace

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def point_clouds(draw, min_size=1, max_size=5, dim=2):
    n = draw(st.integers(min_size, max_size))
    coords = draw(
        st.lists(
            st.lists(st.integers(-20, 20), min_size=dim, max_size=dim),
            min_size=n,
            max_size=n,
            unique_by=tuple,
        )
    )
    return np.asarray(coords, dtype=float) / 4.0


@st.composite
def metric_spaces(draw, min_size=1, max_size=5, prefix="x"):
    pts = draw(point_clouds(min_size, max_size))
    return FiniteMetricSpace.from_points(pts, [f"{prefix}{i}" for i in range(len(pts))])


@st.composite
def pseudo_metrics(draw, max_size=6):
    """Pullback of a Euclidean metric along a surjection: exact zeros, valid triangles."""
    pts = draw(point_clouds(1, max_size))
    n = draw(st.integers(len(pts), max_size + 2))
    cls = draw(st.lists(st.integers(0, len(pts) - 1), min_size=n - len(pts), max_size=n - len(pts)))
    cls = list(range(len(pts))) + cls
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    return d[np.ix_(cls, cls)], cls


def brute_force_gh(dx, dy):
    """Half the least distortion over every covering relation (tiny spaces only)."""
    nx, ny = len(dx), len(dy)
    cells = list(itertools.product(range(nx), range(ny)))
    best = np.inf
    for mask in range(1, 1 << len(cells)):
        rel = [cells[b] for b in range(len(cells)) if mask >> b & 1]
        if {i for i, _ in rel} != set(range(nx)) or {j for _, j in rel} != set(range(ny)):
            continue
        dis = max(abs(dx[i, k] - dy[j, l]) for i, j in rel for k, l in rel)
        best = min(best, dis)
    return 0.5 * best


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


ACCEPTANCE_LINES: list[str] = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
