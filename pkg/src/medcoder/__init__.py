"""Ontology-guided medical coding engine with span-level evidence."""

__version__ = "0.1.0"
