"""Shared randomness helpers for the test suite.

Everything is seeded so failures reproduce; pairs are resampled until the
smallest overlap clears a floor, keeping division-based tolerances honest.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import unitary_group

from weakvalues import BasisPair


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


def haar_unitary(dim, rng):
    return unitary_group.rvs(dim, random_state=rng)


def random_admissible_pair(dim, rng, min_overlap=1e-2):
    # resample until every overlap clears the floor; a handful of tries
    # suffices for dim <= 5
    for _ in range(200):
        pre = haar_unitary(dim, rng)
        post = haar_unitary(dim, rng)
        if np.min(np.abs(post.conj().T @ pre)) > min_overlap:
            return BasisPair(pre, post)
    raise RuntimeError("could not sample an admissible pair")
