"""Paths to the fixture files shipped with the package."""

from importlib import resources
from pathlib import Path


def _path(name: str) -> Path:
    with resources.as_file(resources.files(__package__).joinpath(name)) as p:
        return Path(p)


def toy10_ontology_path() -> Path:
    return _path("toy10.ontology.json")


def toy10_dataset_path() -> Path:
    return _path("toy10.dataset.jsonl")


def toy10_golden_path() -> Path:
    return _path("toy10.golden.jsonl")
