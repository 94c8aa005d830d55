import numpy as np
import pytest

from .core.channel.models import KrausSet, ChoiMatrix
from .core.qubit.models import KingRuskaiForm
from .test_utils.matrix_generator import MatrixGenerator, MatrixCriteria

SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="function")
def identity_kraus():
    return KrausSet(n=2, ops=[np.eye(2)])


@pytest.fixture(scope="function")
def dephasing_kraus():
    return KrausSet(n=2, ops=[np.eye(2) / np.sqrt(2), SIGMA_Z / np.sqrt(2)])


@pytest.fixture(scope="function")
def identity_choi():
    s = np.zeros((4, 4))
    s[0, 0] = s[0, 3] = s[3, 0] = s[3, 3] = 1.0
    return ChoiMatrix(n=2, matrix=s)


@pytest.fixture(scope="function")
def dephasing_choi():
    return ChoiMatrix(n=2, matrix=np.diag([1.0, 0.0, 0.0, 1.0]))


@pytest.fixture(scope="function")
def identity_analysis_matrix():
    """2·S_Φ̂ of the identity qubit channel"""
    s = np.zeros((4, 4))
    s[0, 0] = s[0, 3] = s[3, 0] = s[3, 3] = 2.0
    return s


@pytest.fixture(scope="function")
def sample_qubit_form():
    return KingRuskaiForm(t=(0.2, 0.0, 0.1), lam=(0.4, 0.3, 0.5))


@pytest.fixture(scope="function")
def sample_analysis_matrix():
    """2·S_Φ̂ for t = (0.2, 0, 0.1), Λ = (0.4, 0.3, 0.5)"""
    return np.array(
        [
            [1.6, 0.0, 0.2, 0.7],
            [0.0, 0.6, 0.1, 0.2],
            [0.2, 0.1, 0.4, 0.0],
            [0.7, 0.2, 0.0, 1.4],
        ],
        dtype=np.complex128,
    )


@pytest.fixture(scope="function")
def matrix_generator_factory():
    def factory(dimension: int, seed: int = 0) -> MatrixGenerator:
        return MatrixGenerator(MatrixCriteria(dimension=dimension, seed=seed))

    return factory
