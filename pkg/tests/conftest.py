"""Shared fixtures and helpers for the test suite."""

import math

import numpy as np
import pytest

from bohmdisp.lattice import Lattice

TWO_PI = 2.0 * math.pi


def one_period_lattice(k=1.0, v=2.0, c=1.0, counts=(33, 33, 33)):
    """(t, x, y) lattice spanning one period of each modulated-mode axis.

    Periods: ``2 pi / (k v)`` in t, ``2 pi / k`` in x, and ``2 pi / kappa``
    in y with ``kappa = k sqrt(v^2/c^2 - 1)``.
    """
    kappa = k * math.sqrt(v * v / (c * c) - 1.0)
    extent = (TWO_PI / (k * v), TWO_PI / k, TWO_PI / kappa)
    return Lattice.from_extent((0.0, 0.0, 0.0), extent, counts)


def matched_null_lattice(k=1.0, c=1.0, counts=(33, 33)):
    """(t, x) lattice with ``c * h_t == h_x`` so plane waves cancel exactly."""
    n = counts[1]
    hx = TWO_PI / (k * (n - 1))
    ht = hx / c
    return Lattice(origin=(0.0, 0.0), spacing=(ht, hx), counts=tuple(counts))


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
