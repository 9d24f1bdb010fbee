"""Numerics for Huesler-Reiss extremal graphical models."""

__version__ = "0.1.0"
