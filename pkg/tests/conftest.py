import numpy as np
import pytest

from src.config import settings
from src.states.generator import ginibre, gibbs_state, make_rng


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "output_dir", tmp_path)
    return tmp_path


@pytest.fixture
def random_matrix():
    def build(dim: int, seed: int, hermitian: bool = False) -> np.ndarray:
        M = ginibre(dim, make_rng(seed))
        return (M + M.conj().T) / 2 if hermitian else M

    return build


@pytest.fixture(scope="session")
def gibbs16():
    return gibbs_state(1.0, 16)
