"""Unstructured search by wave dynamics.

Subpackages cover the complex state-vector iteration (`statevec`, `grover`),
the classical oscillator-bank realization (`wavemech`), impurity and disorder
localization on chains (`lattice`), and walk-based spatial search (`spatial`).
The `cli` module runs reproducible experiments and exports CSV/JSON series.
"""

__version__ = "0.1.0"

from . import grover, lattice, spatial, statevec, wavemech  # noqa: F401
