import math

import pytest

from ramclass.abelian_fields import AbelianGroupSpec, count_stratified
from ramclass.dirichlet import PrimeSieve
from ramclass.quadratic import moment_scan, rank_probability_scan

QUAD_CHECKPOINTS = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
C3_CHECKPOINTS = [10 ** 4, 10 ** 5, 10 ** 6, 10 ** 7]


@pytest.fixture(scope="session")
def sieve_10m():
    return PrimeSieve(10 ** 7)


@pytest.fixture(scope="session")
def c3_counts():
    """Exact C3 pair counts on a dense grid up to 1e7, stratified by r."""
    group = AbelianGroupSpec([3])
    omega = group.omega_subset(3, math.inf)
    grid = sorted({int(10 ** (4 + k / 3)) for k in range(10)} | set(C3_CHECKPOINTS))
    strat = count_stratified(group, omega, grid, 3)
    totals = count_stratified(group, frozenset(), grid, 0)[0]
    return {"group": group, "omega": omega, "grid": grid,
            "strat": strat, "totals": totals}


@pytest.fixture(scope="session")
def quad_scan_rows():
    return {
        "moment": moment_scan(QUAD_CHECKPOINTS),
        "probability": rank_probability_scan(QUAD_CHECKPOINTS, 0),
    }
