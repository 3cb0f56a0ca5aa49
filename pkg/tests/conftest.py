import pytest

from proviz.datastore import ingest_csv
from proviz.nn.corpus import generate_corpus
from proviz.nn.embedding import HashingEmbedder
from proviz.nn.train import TrainConfig, train
from tests.paths import FIXTURE_CSV

TRAIN_SEED = 1234


@pytest.fixture(scope="session")
def store():
    return ingest_csv(FIXTURE_CSV)


@pytest.fixture(scope="session")
def provider():
    return HashingEmbedder(dimension=256, seed=0)


@pytest.fixture(scope="session")
def train_result(provider):
    return train(generate_corpus(), provider, TrainConfig(seed=TRAIN_SEED))


@pytest.fixture(scope="session")
def model(train_result):
    return train_result.model
