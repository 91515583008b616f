#!/usr/bin/env python3
"""Run both evaluation settings over the shipped fixture suite and print the
report documents, the fixture-scale analogue of a full benchmark sweep."""

import json

from medcoder.bench import load_dataset, run_eval
from medcoder.fixtures import toy10_dataset_path, toy10_ontology_path
from medcoder.ontology import load_ontology
from medcoder.pipeline import PipelineConfig


def main():
    with open(toy10_ontology_path(), "rb") as fh:
        ontology = load_ontology(fh)
    records = load_dataset(toy10_dataset_path())
    for mode in ("full", "restricted"):
        report = run_eval(ontology, records, PipelineConfig(), runs=5, mode=mode)
        print(f"== {mode} setting ==")
        print(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
