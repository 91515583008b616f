import json

import pytest

from medcoder.bench import load_dataset
from medcoder.fixtures import (
    toy10_dataset_path,
    toy10_golden_path,
    toy10_ontology_path,
)
from medcoder.ontology import load_ontology


@pytest.fixture(scope="session")
def toy10():
    with open(toy10_ontology_path(), "rb") as fh:
        return load_ontology(fh)


@pytest.fixture(scope="session")
def toy10_doc():
    return json.loads(toy10_ontology_path().read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def toy10_dataset():
    return load_dataset(toy10_dataset_path())


@pytest.fixture(scope="session")
def toy10_golden_lines():
    return toy10_golden_path().read_bytes().splitlines()
