"""Grover iteration, its exact two-level model, and query-count formulas.

One search iteration is the oracle reflection at the marked indices followed by
the diffusion reflection about the initial state.  For a normalized initial
state with overlap cos(theta) onto the (normalized) marked subspace the
iteration is an exact rotation by pi - 2*theta in the plane spanned by the two,
so the full N-dimensional run is reproduced by a closed-form two-level model.

Angle conventions: the overlap is written cos(theta) with theta measured from
the marked state; internal success formulas use the complement
alpha = pi/2 - theta = asin(overlap), which removes a chronic source of
sign/complement mistakes.  Success probability after k iterations is
sin^2((2k+1) * alpha).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .statevec import StateVector, reflect_about, success_probability, uniform_state

_TWO_PI = 2.0 * math.pi

#: Stop reasons recorded on a Trajectory.
STOP_FIXED_STEPS = "fixed-steps"
STOP_THRESHOLD = "threshold"


def _normalize_phase(phase: float, name: str) -> float:
    """Reduce a phase modulo 2*pi into (0, 2*pi); reject multiples of 2*pi."""
    reduced = float(phase) % _TWO_PI
    if reduced == 0.0:
        raise ValueError(f"{name} must not be a multiple of 2*pi (the operator would be the identity)")
    return reduced


@dataclass(frozen=True, eq=False)
class SearchSpec:
    """One search problem: database size, marked indices, phases, initial state.

    Phases are stored reduced modulo 2*pi, so an oracle phase of -pi is the
    same problem as +pi (the two reflections are the same operator).
    """

    n: int
    targets: frozenset[int]
    oracle_phase: float = math.pi
    diffusion_phase: float = math.pi
    initial: StateVector | None = None

    def __post_init__(self) -> None:
        targets = frozenset(int(t) for t in self.targets)
        if self.n < 2:
            raise ValueError(f"database size must be at least 2, got {self.n}")
        if not targets:
            raise ValueError("at least one target index is required")
        if len(targets) >= self.n:
            raise ValueError(f"need fewer targets than database entries: {len(targets)} >= {self.n}")
        if min(targets) < 0 or max(targets) >= self.n:
            raise ValueError("target index out of range")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "oracle_phase", _normalize_phase(self.oracle_phase, "oracle_phase"))
        object.__setattr__(self, "diffusion_phase", _normalize_phase(self.diffusion_phase, "diffusion_phase"))
        initial = self.initial if self.initial is not None else uniform_state(self.n)
        if initial.dimension != self.n:
            raise ValueError(f"initial state has dimension {initial.dimension}, expected {self.n}")
        if not initial.is_normalized():
            raise ValueError("initial state is not normalized")
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "_target_idx", np.fromiter(sorted(targets), dtype=np.intp))

    @property
    def m(self) -> int:
        """Number of marked indices."""
        return len(self.targets)

    @property
    def target_indices(self) -> np.ndarray:
        return self._target_idx  # type: ignore[attr-defined]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Success probability on the marked set after 0, 1, 2, ... iterations."""

    probabilities: tuple[float, ...]
    spec: SearchSpec
    stop_reason: str

    def records(self) -> list[tuple[int, float]]:
        return list(enumerate(self.probabilities))

    @property
    def steps(self) -> int:
        return len(self.probabilities) - 1

    def peak(self) -> tuple[int, float]:
        """(step, probability) of the highest entry; earliest step wins ties."""
        k = int(np.argmax(self.probabilities))
        return k, self.probabilities[k]


def grover_step(state: StateVector, spec: SearchSpec) -> StateVector:
    """One search iteration: oracle phase at the targets, then diffusion.

    The oracle multiplies each marked amplitude by e^{i*oracle_phase} (a
    product of commuting rank-1 phase reflections).  The diffusion reflects
    about ``spec.initial`` with ``diffusion_phase``.  For the pure-reflection
    case (diffusion phase pi) an overall minus sign is applied as well, which
    is unobservable but makes the simulated operator match the conventional
    two-level rotation matrix entry for entry; for generalized diffusion
    phases no such sign is defined and none is applied.
    """
    if state.dimension != spec.n:
        raise ValueError(f"dimension mismatch: state has {state.dimension}, spec has {spec.n}")
    amps = state.amplitudes.copy()
    # exact -1 at phase pi keeps real-valued evolutions exactly real
    oracle_factor = -1.0 if spec.oracle_phase == math.pi else cmath.exp(1j * spec.oracle_phase)
    amps[spec.target_indices] *= oracle_factor
    out = reflect_about(StateVector(amps), spec.initial, spec.diffusion_phase)
    if spec.diffusion_phase == math.pi:
        out = StateVector(-out.amplitudes)
    return out


def run(spec: SearchSpec, steps: int) -> Trajectory:
    """Iterate ``steps`` times from the initial state, recording success probability."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = spec.initial
    probs = [success_probability(state, spec.targets)]
    for _ in range(steps):
        state = grover_step(state, spec)
        probs.append(success_probability(state, spec.targets))
    return Trajectory(tuple(probs), spec, STOP_FIXED_STEPS)


def threshold_step_cap(n: int) -> int:
    """Iteration cap guaranteeing termination of threshold-triggered runs."""
    return math.ceil(10.0 * math.sqrt(n))


def run_until_threshold(spec: SearchSpec, tau: float) -> Trajectory:
    """Iterate until the success probability first reaches ``tau``.

    Stops at the first entry >= tau (stop reason "threshold"), or after
    ceil(10*sqrt(N)) iterations (stop reason "fixed-steps") if the threshold
    exceeds what the oscillation ever attains.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {tau}")
    cap = threshold_step_cap(spec.n)
    state = spec.initial
    probs = [success_probability(state, spec.targets)]
    if probs[0] >= tau:
        return Trajectory(tuple(probs), spec, STOP_THRESHOLD)
    for _ in range(cap):
        state = grover_step(state, spec)
        probs.append(success_probability(state, spec.targets))
        if probs[-1] >= tau:
            return Trajectory(tuple(probs), spec, STOP_THRESHOLD)
    return Trajectory(tuple(probs), spec, STOP_FIXED_STEPS)


def predicted_success(overlap: float, steps: int) -> float:
    """Two-level model success probability after ``steps`` iterations."""
    return math.sin((2 * steps + 1) * math.asin(overlap)) ** 2


def _first_peak_step(alpha: float) -> int:
    """Iteration count k >= 0 whose success sin^2((2k+1)*alpha) tops the first swing.

    The continuous optimum is (pi/(2*alpha) - 1)/2; of its two integer
    neighbours the one with higher success wins, the smaller on an exact tie.
    """
    k_star = (math.pi / (2.0 * alpha) - 1.0) / 2.0
    lo = max(0, math.floor(k_star))
    hi = max(0, math.ceil(k_star))
    best = lo
    for k in (lo, hi):
        if math.sin((2 * k + 1) * alpha) ** 2 > math.sin((2 * best + 1) * alpha) ** 2:
            best = k
    return best


@dataclass(frozen=True)
class TwoLevelModel:
    """Closed-form description of the search confined to its two-level plane."""

    theta: float
    rotation_per_iteration: float
    generator_eigenvalues: tuple[float, float]
    optimal_iterations: int


def two_level_model(overlap: float) -> TwoLevelModel:
    """Exact two-level reduction for a given initial/marked overlap cos(theta)."""
    if not 0.0 < overlap <= 1.0:
        raise ValueError(f"overlap must lie in (0, 1], got {overlap}")
    theta = math.acos(overlap)
    rotation = math.pi - 2.0 * theta
    eigen = (2.0 * theta - math.pi, math.pi - 2.0 * theta)
    return TwoLevelModel(theta, rotation, eigen, _first_peak_step(math.asin(overlap)))


def optimal_queries(n: int, m: int = 1) -> int:
    """Oracle calls that maximize success for m marked items out of n."""
    if m < 1 or m >= n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    return two_level_model(math.sqrt(m / n)).optimal_iterations


def database_size_for_queries(queries: int) -> float:
    """Database size searched exactly (probability one) by a given query count.

    Solves (2Q+1) * asin(1/sqrt(N)) = pi/2 for N; the solution is generally
    not an integer.  Evaluated in extended precision and rounded once so that
    e.g. Q=1 yields exactly 4.0.
    """
    if queries < 1:
        raise ValueError(f"query count must be positive, got {queries}")
    with mpmath.workdps(30):
        return float(1 / mpmath.sin(mpmath.pi / (2 * (2 * queries + 1))) ** 2)


def boolean_search_size(queries: int) -> int:
    """Database size resolved by the same number of binary comparisons: 2^Q."""
    if queries < 1:
        raise ValueError(f"query count must be positive, got {queries}")
    if queries > 62:
        raise ValueError(f"query count {queries} would overflow a 64-bit size")
    return 1 << queries


def step_generator_spectrum(overlap: float) -> list[tuple[float, StateVector]]:
    """Eigenpairs of the Hermitian generator of one iteration, in the 2-D plane.

    Basis order is (marked state, its in-plane orthogonal complement).  The
    generator has eigenvalues +-(2*theta - pi); both eigenvectors put half
    their weight on the marked state, i.e. marking creates a bound pair in an
    otherwise flat spectrum.  Each returned pair is verified against the
    explicit 2x2 step operator: U v = e^{-i*lambda} v to 1e-10.
    """
    if not 0.0 < overlap < 1.0:
        raise ValueError(f"degenerate geometry: overlap must lie strictly in (0, 1), got {overlap}")
    theta = math.acos(overlap)
    lam = 2.0 * theta - math.pi
    pairs = [
        (lam, StateVector(np.array([1.0, 1j]) / math.sqrt(2.0))),
        (-lam, StateVector(np.array([1.0, -1j]) / math.sqrt(2.0))),
    ]
    c, s = math.cos(theta), math.sin(theta)
    step_op = np.array([[1.0 - 2.0 * c * c, 2.0 * c * s], [-2.0 * c * s, 2.0 * s * s - 1.0]])
    for value, vector in pairs:
        residual = step_op @ vector.amplitudes - cmath.exp(-1j * value) * vector.amplitudes
        if np.max(np.abs(residual)) > 1e-10:
            raise RuntimeError("step operator eigenpair verification failed")
    return pairs


@dataclass(frozen=True, eq=False)
class AmplificationResult:
    """Trajectory of an amplitude-amplification run plus its best stopping point."""

    trajectory: Trajectory
    best_step: int
    best_probability: float


def amplitude_amplify(initial: StateVector, targets: Iterable[int]) -> AmplificationResult:
    """Run the iteration with diffusion about an arbitrary initial state.

    The query count to the first success peak scales as the reciprocal of the
    overlap between the initial state and the marked subspace.  The trajectory
    covers ceil(3/overlap) iterations; ``best_step`` is the success argmax
    within the first oscillation swing (earliest step on ties).
    """
    target_set = frozenset(int(t) for t in targets)
    if not initial.is_normalized():
        raise ValueError("initial state is not normalized")
    overlap = math.sqrt(min(1.0, success_probability(initial, target_set)))
    if overlap <= 1e-12:
        raise ValueError("initial state has no overlap with the marked subspace; the iteration cannot converge")
    spec = SearchSpec(initial.dimension, target_set, initial=initial)
    steps = math.ceil(3.0 / overlap)
    trajectory = run(spec, steps)
    window = min(steps, math.floor(math.pi / (2.0 * math.asin(overlap))))
    best = int(np.argmax(trajectory.probabilities[: window + 1]))
    return AmplificationResult(trajectory, best, trajectory.probabilities[best])


def peak_within_budget(spec: SearchSpec, budget: int) -> float:
    """Highest success probability reachable in at most ``budget`` iterations."""
    return max(run(spec, budget).probabilities)


def sweep_phases(
    n: int,
    targets: Iterable[int],
    phases: Sequence[float],
    budget: int | None = None,
) -> dict[str, list[float]]:
    """Peak success within a fixed iteration budget, matched vs mismatched phases.

    For each phase phi the matched pair applies (phi, phi) to oracle and
    diffusion; the mismatched pair applies (phi, pi).  The budget defaults to
    the optimal iteration count of the plain-reflection search, which is what
    makes "pi performs best" a fair statement: given unbounded iterations every
    matched pair creeps arbitrarily close to certainty.
    """
    target_set = frozenset(int(t) for t in targets)
    if budget is None:
        budget = optimal_queries(n, len(target_set))
    matched = []
    mismatched = []
    for phi in phases:
        matched.append(peak_within_budget(SearchSpec(n, target_set, phi, phi), budget))
        mismatched.append(peak_within_budget(SearchSpec(n, target_set, phi, math.pi), budget))
    return {"phases": list(phases), "matched": matched, "mismatched": mismatched}
