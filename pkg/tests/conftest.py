import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from scipy.spatial.distance import cdist

from metric_embed import validate_metric

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def metric_spaces(draw, min_n=2, max_n=12):
    """Random point clouds under an l_1, l_2 or l_inf metric, deduplicated."""
    n = draw(st.integers(min_n, max_n))
    dim = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2**31 - 1))
    metric = draw(st.sampled_from(["cityblock", "euclidean", "chebyshev"]))
    scale = draw(st.sampled_from([1.0, 10.0, 100.0]))
    pts = np.random.default_rng(seed).integers(0, 50, size=(n, dim)) * scale / 50
    pts = np.unique(pts, axis=0)
    if pts.shape[0] < min_n:
        pts = np.vstack([pts, pts.max(axis=0) + scale * np.arange(1, min_n - pts.shape[0] + 1)[:, None]])
    return validate_metric(cdist(pts, pts, metric))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for r in sorted(results, key=lambda r: r.number):
            terminalreporter.write_line(r.line())
