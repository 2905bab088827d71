"""Shared fixtures and frozen oracle values.

All reference numbers below were computed by dense diagonalization (or
high-tolerance Lanczos for the largest chains) before the modules under test
were written, and are kept frozen here.
"""

import math

import pytest

import certground as cg

# exact Heisenberg ground-state energy density, e_min = 1/2 - 2 ln 2
EMIN = 0.5 - 2.0 * math.log(2.0)

# lambda_min of the open-boundary Heisenberg chain h_m, m sites
CHAIN = {
    2: -1.5,
    3: -2.0,
    4: -3.232050807569,
    5: -3.855772506636,
    6: -4.987154267776,
    7: -5.672479361373,
    8: -6.749865197376,
    9: -7.472643412759,
    10: -8.516070414566,
    11: -9.264186604719,
    12: -10.284181265681,
    13: -11.050644194167,
    14: -12.053449323724,
    15: -12.833840983587,
}

# energy density lambda_min / n of the n-site periodic Heisenberg ring
RING = {
    2: -1.5,
    3: -0.5,
    4: -1.0,
    5: -0.747213595500,
    6: -0.934258545911,
    8: -0.912773352234,
}

# lambda_min of the open 3x3 Heisenberg patch (D = 2)
PATCH2D_3 = -9.498654517106


@pytest.fixture(scope="session")
def heisenberg():
    return cg.builtin_model("heisenberg")


@pytest.fixture(scope="session")
def zz_model():
    import json

    return cg.parse_model(json.dumps({
        "name": "zz", "d": 2, "D": 1,
        "term": {"pauli_sum": [{"paulis": "ZZ", "coeff": 1.0}]},
    }))


@pytest.fixture(scope="session")
def zero_model():
    import json

    return cg.parse_model(json.dumps({
        "name": "zero", "d": 2, "D": 1,
        "term": {"dense": [[0.0, 0.0]] * 16},
    }))
