"""Shared fixtures: solved closure momenta and traces are expensive, so they
are computed once per session and reused across test modules."""

import pytest

from pelastica.cli import REFERENCE_TABLE
from pelastica.closure import ClosureIndex, solve_closure
from pelastica.curve import trace_closed_curve
from pelastica.qpotential import make_params


@pytest.fixture(scope="session")
def solved_rows():
    """Map (p, n, m) -> solved ClosureIndex for every reference-table row."""
    out = {}
    for _, p, n, m, *_ in REFERENCE_TABLE:
        out[(p, n, m)] = solve_closure(p, ClosureIndex(n, m))
    return out


@pytest.fixture(scope="session")
def g23_solved(solved_rows):
    return solved_rows[(0.3, 2, 3)]


@pytest.fixture(scope="session")
def g23_params(g23_solved):
    return make_params(0.3, g23_solved.a_solved)


@pytest.fixture(scope="session")
def g23_trace(g23_solved):
    return trace_closed_curve(0.3, g23_solved)


@pytest.fixture(scope="session")
def all_traces(solved_rows):
    """Reconstructed traces for every reference-table row (lazy dict)."""
    cache = {}

    def get(p, n, m):
        key = (p, n, m)
        if key not in cache:
            cache[key] = trace_closed_curve(p, solved_rows[key])
        return cache[key]

    return get
