"""Shared generators for randomized tests.

Metric complexes are built from Euclidean point clouds so that every
triangle satisfies the triangle inequality and all star weights are
non-negative.
"""

import itertools

import numpy as np
import pytest

from simplexsp import SimplicialComplex, WeightedGraph


def random_metric_complex(
    rng, n=None, edge_prob=0.4, triangle_prob=0.5, dim=3, connected=False
):
    """Random complex whose edge weights are Euclidean distances."""
    if n is None:
        n = int(rng.integers(4, 31))
    pts = rng.random((n, dim)) * 10.0
    edges = {}
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < edge_prob or (connected and j == i + 1):
            edges[(i, j)] = float(np.linalg.norm(pts[i] - pts[j]))
    g = WeightedGraph(range(n), edges)
    adj = g.adjacency_sets()
    triangles = []
    for i, j in edges:
        for k in adj[i] & adj[j]:
            if k > j and rng.random() < triangle_prob:
                triangles.append((i, j, k))
    return SimplicialComplex(range(n), edges, triangles)


def random_positive_triple(rng, lo=0.1, hi=10.0):
    """Log-uniform weight triple in [lo, hi]."""
    return tuple(np.exp(rng.uniform(np.log(lo), np.log(hi), 3)))


def pendant_complex(rng, tail_len=3):
    """One random-weight triangle plus a pendant tail hanging off vertex 0."""
    w = random_positive_triple(rng, 0.5, 2.0)
    edges = {(0, 1): w[0], (0, 2): w[1], (1, 2): w[2]}
    prev = 0
    for t in range(tail_len):
        v = 3 + t
        edges[(prev, v)] = float(rng.uniform(0.5, 2.0))
        prev = v
    return SimplicialComplex(range(3 + tail_len), edges, [(0, 1, 2)]), w


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Scoreboard lines recorded by the acceptance suite; echoed after the run
# so they are visible even under captured output.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
