"""Classical realization on a bank of coupled wave modes.

N real mode amplitudes evolve under two maps: a sign flip of the target mode
(reflection off the marked node) and inversion about the mean (overrelaxation
about the synchronized direction).  Squared amplitude is energy here, so the
iteration is an energy-focusing protocol, and run backwards an energy-dispersal
protocol.  No energy is supplied or extracted by either map.

For a real initial state and pi phases this evolution coincides, amplitude for
amplitude, with the complex search iteration: superposition is the only wave
ingredient the algorithm actually needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grover


@dataclass(frozen=True, eq=False)
class OscillatorBank:
    """N real mode amplitudes in units of sqrt(energy); total energy is cached."""

    amplitudes: np.ndarray
    total_energy: float = 0.0  # recomputed on construction

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.float64, copy=True).reshape(-1)
        if amps.size < 1:
            raise ValueError("a bank needs at least one mode")
        if not np.all(np.isfinite(amps)):
            raise ValueError("mode amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "total_energy", float(amps @ amps))

    @property
    def modes(self) -> int:
        return int(self.amplitudes.size)

    def energy_fraction(self, mode: int) -> float:
        """Share of the total energy sitting in one mode."""
        if not 0 <= mode < self.modes:
            raise ValueError(f"mode {mode} out of range for {self.modes} modes")
        return float(self.amplitudes[mode] ** 2 / self.total_energy)


def init_bank(n: int, total_energy: float = 1.0) -> OscillatorBank:
    """Synchronized equilibrium bank: every mode at sqrt(E/N)."""
    if n < 2:
        raise ValueError(f"need at least 2 modes, got {n}")
    if total_energy <= 0.0:
        raise ValueError(f"total energy must be positive, got {total_energy}")
    return OscillatorBank(np.full(n, math.sqrt(total_energy / n)))


def reflect_target(bank: OscillatorBank, target: int) -> OscillatorBank:
    """Flip the sign of the target mode amplitude; an involution."""
    if not 0 <= target < bank.modes:
        raise ValueError(f"target {target} out of range for {bank.modes} modes")
    amps = bank.amplitudes.copy()
    amps[target] = -amps[target]
    return OscillatorBank(amps)


def invert_about_mean(bank: OscillatorBank) -> OscillatorBank:
    """Overrelaxation: a_i -> 2*mean(a) - a_i; an involution and an isometry."""
    mean = float(bank.amplitudes.mean())
    return OscillatorBank(2.0 * mean - bank.amplitudes)


def focus_step(bank: OscillatorBank, target: int) -> OscillatorBank:
    """One focusing iteration: reflect the target, then invert about the mean."""
    return invert_about_mean(reflect_target(bank, target))


def disperse_step(bank: OscillatorBank, target: int) -> OscillatorBank:
    """Inverse of focus_step (each half is its own inverse, applied in reverse order)."""
    return reflect_target(invert_about_mean(bank), target)


@dataclass(frozen=True, eq=False)
class EnergyTrajectory:
    """Energy fraction at the tracked mode after 0, 1, 2, ... iterations."""

    fractions: tuple[float, ...]
    mode: int
    stop_reason: str
    final_bank: OscillatorBank

    def records(self) -> list[tuple[int, float]]:
        return list(enumerate(self.fractions))

    @property
    def steps(self) -> int:
        return len(self.fractions) - 1


def run_focus(
    n: int,
    target: int,
    steps: int | None = None,
    threshold: float | None = None,
    total_energy: float = 1.0,
) -> EnergyTrajectory:
    """Focus energy onto one mode, for a fixed step count or until a threshold.

    Exactly one of ``steps`` / ``threshold`` must be given.  Threshold mode
    stops once the target's energy fraction reaches the threshold, capped at
    ceil(10*sqrt(N)) iterations.
    """
    if (steps is None) == (threshold is None):
        raise ValueError("give exactly one of steps or threshold")
    bank = init_bank(n, total_energy)
    if target < 0 or target >= n:
        raise ValueError(f"target {target} out of range for {n} modes")
    fractions = [bank.energy_fraction(target)]
    if threshold is not None:
        if not 0.0 < threshold <= 1.0:
            raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
        if fractions[0] >= threshold:
            return EnergyTrajectory(tuple(fractions), target, grover.STOP_THRESHOLD, bank)
        for _ in range(grover.threshold_step_cap(n)):
            bank = focus_step(bank, target)
            fractions.append(bank.energy_fraction(target))
            if fractions[-1] >= threshold:
                return EnergyTrajectory(tuple(fractions), target, grover.STOP_THRESHOLD, bank)
        return EnergyTrajectory(tuple(fractions), target, grover.STOP_FIXED_STEPS, bank)
    if steps < 0:
        raise ValueError("steps must be non-negative")
    for _ in range(steps):
        bank = focus_step(bank, target)
        fractions.append(bank.energy_fraction(target))
    return EnergyTrajectory(tuple(fractions), target, grover.STOP_FIXED_STEPS, bank)


def run_disperse(bank: OscillatorBank, target: int, steps: int) -> EnergyTrajectory:
    """Run the iteration in reverse, spreading the target mode's energy back out."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    fractions = [bank.energy_fraction(target)]
    for _ in range(steps):
        bank = disperse_step(bank, target)
        fractions.append(bank.energy_fraction(target))
    return EnergyTrajectory(tuple(fractions), target, grover.STOP_FIXED_STEPS, bank)


@dataclass(frozen=True)
class ResourceReport:
    """Spatial and temporal resources of the three ways to search N items.

    The wave and quantum versions use the same number of oracle calls; the
    wave version pays N modes of space where the quantum one pays log2(N)
    qubits.  Two classical baselines are reported: binary comparison search
    (ceil(log2 N) queries, the best Boolean strategy) and worst-case one-by-one
    membership testing (N - 1 queries).
    """

    wave_modes: int
    qubits: int
    queries: int
    boolean_search_queries: int
    membership_queries: int


def resource_report(n: int) -> ResourceReport:
    if n < 2:
        raise ValueError(f"need at least 2 modes, got {n}")
    qubits = (n - 1).bit_length()
    return ResourceReport(
        wave_modes=n,
        qubits=qubits,
        queries=grover.optimal_queries(n, 1),
        boolean_search_queries=qubits,
        membership_queries=n - 1,
    )
