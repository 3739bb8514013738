"""Coulomb gas samplers, exactly solvable planar matrix ensembles, and the
statistical checks tying the two together."""

__version__ = "0.1.0"
