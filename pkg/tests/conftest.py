"""Shared fixtures: hand-checkable instances and random-instance generators."""

from __future__ import annotations

import numpy as np
import pytest

from weakbounds import DatasetView, GMatrix, LabelModel


def two_point_instance(p1: float):
    """n=2, one signature, G rows [0,1] and [1,0], P(Y=1|z) = p1.

    Exact bounds by greedy transport: lower = min coupling cost, upper = max.
    For p1=0.5 the exact bounds are (0, 1); for p1=0.75 they are (0.25, 0.75).
    """
    data = DatasetView(n=2, z_ids=np.array([0, 0]))
    G = GMatrix(values=np.array([[0.0, 1.0], [1.0, 0.0]]), sup_norm=1.0)
    model = LabelModel(table=np.array([[1.0 - p1, p1]]))
    return data, model, G


def random_instance(rng, n_max=60, num_classes=2, num_sig_max=5, sup=1.0):
    """Random dataset/model/G triple with |g| <= sup and Dirichlet model rows."""
    n = int(rng.integers(2, n_max + 1))
    num_z = int(rng.integers(1, num_sig_max + 1))
    z_ids = rng.integers(0, num_z, n)
    z_ids[: min(num_z, n)] = np.arange(min(num_z, n))  # every signature occurs
    values = rng.uniform(-sup, sup, (n, num_classes))
    G = GMatrix(values=values, sup_norm=sup)
    rows = rng.dirichlet(np.ones(num_classes), num_z)
    model = LabelModel(table=rows)
    data = DatasetView(n=n, z_ids=z_ids)
    return data, model, G


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
