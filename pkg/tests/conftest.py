import functools

import numpy as np
import pytest

from laddyn import dynamics, model

ALL_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
LEG_CLASS_PAIRS = ((1, 3), (1, 4), (2, 3), (2, 4))


@functools.lru_cache(maxsize=None)
def propagator(d: float, graph=model.DEFAULT_GRAPH) -> dynamics.Propagator:
    h = model.build_hamiltonian(model.ModelParams(d=d), graph)
    return dynamics.make_propagator(h, model.initial_state())


def evolved(d: float, t: float) -> np.ndarray:
    return dynamics.evolve(propagator(d), t)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


def random_state(rng, dim: int = 16) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_hermitian(rng, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2
