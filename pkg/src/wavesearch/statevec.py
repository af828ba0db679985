"""State vectors over a flat index space, and the rank-1 reflections they support.

Amplitudes are complex doubles addressed by a flat basis index 0..N-1; there is
deliberately no qubit or tensor-product structure.  The squared magnitude of an
amplitude is the probability (or, for real-valued banks elsewhere, the energy)
carried by that basis state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

# A reflection axis must be normalized: ||axis||^2 may be off 1 by at most this.
AXIS_NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable vector of complex amplitudes over N basis states."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True).reshape(-1)
        if amps.size < 1:
            raise ValueError("a state needs at least one amplitude")
        if not (np.all(np.isfinite(amps.real)) and np.all(np.isfinite(amps.imag))):
            raise ValueError("state amplitudes must be finite (no NaN or inf)")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = AXIS_NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol


def uniform_state(n: int) -> StateVector:
    """Equal-amplitude state: every entry is 1/sqrt(N)."""
    if n < 1:
        raise ValueError(f"invalid dimension N={n}; need N >= 1")
    return StateVector(np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128))


def basis_state(n: int, index: int) -> StateVector:
    """Unit amplitude on a single basis index."""
    if n < 1:
        raise ValueError(f"invalid dimension N={n}; need N >= 1")
    if not 0 <= index < n:
        raise ValueError(f"index {index} out of range for dimension {n}")
    amps = np.zeros(n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} != {b.dimension}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def reflect_about(state: StateVector, axis: StateVector, phase: float = math.pi) -> StateVector:
    """Apply (I - (1 - e^{i*phase}) |axis><axis|) to ``state``.

    With phase = pi this is the exact reflection I - 2|axis><axis|.  Implemented
    as a rank-1 update, O(N) per call, never as a dense matrix.
    """
    if state.dimension != axis.dimension:
        raise ValueError(f"dimension mismatch: {state.dimension} != {axis.dimension}")
    if abs(axis.norm_squared() - 1.0) > AXIS_NORM_TOL:
        raise ValueError("reflection axis is not normalized")
    # e^{i*pi} is exactly -1; taking the float detour would leak a ~1e-16
    # imaginary part into otherwise purely real evolutions.
    factor = 2.0 if phase == math.pi else 1.0 - cmath.exp(1j * phase)
    coeff = factor * np.vdot(axis.amplitudes, state.amplitudes)
    return StateVector(state.amplitudes - coeff * axis.amplitudes)


def probability(state: StateVector, index: int) -> float:
    """|amplitude|^2 at one basis index."""
    if not 0 <= index < state.dimension:
        raise ValueError(f"index {index} out of range for dimension {state.dimension}")
    return float(abs(state.amplitudes[index]) ** 2)


def success_probability(state: StateVector, targets: Iterable[int]) -> float:
    """Total probability carried by a set of basis indices."""
    idx = list(targets)
    if not idx:
        return 0.0
    if min(idx) < 0 or max(idx) >= state.dimension:
        raise ValueError("target index out of range")
    return float(np.sum(np.abs(state.amplitudes[idx]) ** 2))
