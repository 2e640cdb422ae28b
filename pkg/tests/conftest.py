import pytest

from asrt.kernel import ProofStore, pa, sbox_pa
from asrt.corpus import build_corpus, build_unsound_corpus


@pytest.fixture(scope="session")
def t_pa():
    return pa()


@pytest.fixture(scope="session")
def t_box():
    return sbox_pa()


@pytest.fixture(scope="session")
def session_store():
    return ProofStore()


@pytest.fixture(scope="session")
def corpus(session_store):
    return build_corpus(session_store)


@pytest.fixture(scope="session")
def unsound_corpus():
    return build_unsound_corpus()
