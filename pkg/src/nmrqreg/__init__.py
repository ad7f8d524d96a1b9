"""Modeling toolkit for ensemble solid-state NMR quantum registers."""

__version__ = "0.1.0"
