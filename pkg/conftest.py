# Shared fixtures: a seeded generator and the standard one-qubit matrices

import os
import sys

import numpy as np
import pytest

# Add current directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def I2():
    return np.eye(2, dtype=np.complex128)


@pytest.fixture
def X():
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


@pytest.fixture
def Y():
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


@pytest.fixture
def Z():
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


@pytest.fixture
def H():
    return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


@pytest.fixture
def P0():
    return np.array([[1, 0], [0, 0]], dtype=np.complex128)


@pytest.fixture
def P1():
    return np.array([[0, 0], [0, 1]], dtype=np.complex128)


@pytest.fixture
def PLUS():
    """|+><+|"""
    return np.full((2, 2), 0.5, dtype=np.complex128)
