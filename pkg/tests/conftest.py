import pytest

from vcRegularity.components.graph_generators import generate
from vcRegularity.entity.config_entity import FamilySpec


@pytest.fixture
def block_diagonal():
    """8x8, E = (A x C) ∪ (B x D) with A, C the first halves of X, Y."""
    return generate(FamilySpec(family="block-diagonal", n_x=8, n_y=8))


@pytest.fixture
def matching():
    return generate(FamilySpec(family="matching", n_x=5, n_y=5))


@pytest.fixture
def matching3():
    return generate(FamilySpec(family="matching", n_x=3, n_y=3))


@pytest.fixture
def complete():
    return generate(FamilySpec(family="complete", n_x=4, n_y=4))


@pytest.fixture
def powerset3():
    return generate(FamilySpec(family="powerset", n_x=8, n_y=3))


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """A scratch working directory without config.yaml / params.yaml."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("VCREG_THREADS", raising=False)
    return tmp_path
