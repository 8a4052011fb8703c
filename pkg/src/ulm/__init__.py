"""Symbolic verification workbench for ramified unitary local models."""
