"""Tile assembly systems at high temperature: simulation, threshold
programming, SAT reductions and shape construction."""

__version__ = "0.1.0"
