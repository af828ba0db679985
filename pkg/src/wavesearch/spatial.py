"""Search spread out in space: walks on graphs instead of global reflections.

On the complete graph a continuous-time walk under H = -gamma*A - sum |w><w|
reproduces the plain search exactly (for gamma = 1/N it is a two-level Rabi
oscillation peaking at probability 1 at time pi*sqrt(N)/2).  On sparse graphs
the diffusion reflection is replaced by a coined discrete-time walk: a Grover
coin mixes the direction register at every vertex, a flip-flop shift moves the
walker, and marked vertices are tagged by a coin-space phase flip before the
coin.  Coin and marking conventions are a choice; alternate conventions shift
constants but not the qualitative behaviour tested here.

Direction order for the coin register: 1-D torus (+x, -x); 2-D torus
(+x, -x, +y, -y).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import grover

KIND_COMPLETE = "complete"
KIND_TORUS_1D = "torus1d"
KIND_TORUS_2D = "torus2d"


class PeakDetectionError(RuntimeError):
    """Fewer than two success peaks found within the search horizon."""


class RevivalError(RuntimeError):
    """The second success peak fell below the expected revival level."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected regular graph: a complete graph or a 1-D/2-D torus.

    Adjacency is implicit in the kind and side lengths; ``neighbors_of``
    materializes one vertex's neighbour list on demand (for a complete graph a
    stored list would be O(V^2) memory for no benefit).
    """

    kind: str
    vertex_count: int
    dims: tuple[int, ...]

    @property
    def degree(self) -> int:
        if self.kind == KIND_COMPLETE:
            return self.vertex_count - 1
        return 2 * len(self.dims)

    def neighbors_of(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.vertex_count:
            raise ValueError(f"vertex {v} out of range")
        if self.kind == KIND_COMPLETE:
            return tuple(u for u in range(self.vertex_count) if u != v)
        if self.kind == KIND_TORUS_1D:
            (length,) = self.dims
            return ((v + 1) % length, (v - 1) % length)
        width, height = self.dims
        x, y = divmod(v, height)
        return (
            ((x + 1) % width) * height + y,
            ((x - 1) % width) * height + y,
            x * height + (y + 1) % height,
            x * height + (y - 1) % height,
        )


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise ValueError(f"a complete graph needs at least 2 vertices, got {n}")
    return Graph(KIND_COMPLETE, n, (n,))


def torus_1d(length: int) -> Graph:
    if length < 3:
        raise ValueError(f"a 1-D torus needs at least 3 vertices, got {length}")
    return Graph(KIND_TORUS_1D, length, (length,))


def torus_2d(width: int, height: int) -> Graph:
    if width < 3 or height < 3:
        raise ValueError(f"2-D torus sides must be at least 3, got {width}x{height}")
    return Graph(KIND_TORUS_2D, width * height, (width, height))


# ---------------------------------------------------------------------------
# Continuous-time walk on the complete graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CtqwTrajectory:
    """Sampled marked-set probability of a continuous-time walk."""

    times: tuple[float, ...]
    probabilities: tuple[float, ...]
    dt: float
    renormalizations: int
    max_norm_drift: float

    def peak(self) -> tuple[float, float]:
        """(time, probability) of the highest sample; earliest wins ties."""
        k = int(np.argmax(self.probabilities))
        return self.times[k], self.probabilities[k]


def ctqw_max_dt(n: int) -> float:
    """Largest integrator step honouring the accuracy contract."""
    return 0.05 / math.sqrt(n)


def ctqw_search(
    graph: Graph,
    gamma: float,
    targets: Iterable[int],
    total_time: float,
    dt: float | None = None,
) -> CtqwTrajectory:
    """Evolve exp(-iHt) under H = -gamma*A - sum_w |w><w| from the uniform state.

    Only the complete graph is supported (its adjacency action is the O(N)
    closed form A psi = sum(psi) - psi).  A fixed-step 4th-order integrator is
    used with a renormalization guard: the state is rescaled only when the
    norm drifts beyond 1e-12, and every such rescue is counted.  Probability
    on the marked set is sampled at multiples of max(dt, total_time/1000).
    """
    if graph.kind != KIND_COMPLETE:
        raise ValueError("continuous-time search is only supported on the complete graph")
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if total_time < 0.0:
        raise ValueError("total_time must be non-negative")
    n = graph.vertex_count
    limit = ctqw_max_dt(n)
    if dt is None:
        dt = limit
    if dt <= 0.0 or dt > limit * (1.0 + 1e-12):
        raise ValueError(f"dt must lie in (0, {limit:.6g}] for N={n}, got {dt}")
    target_list = sorted({int(t) for t in targets})
    if not target_list or target_list[0] < 0 or target_list[-1] >= n or len(target_list) >= n:
        raise ValueError("targets must be a non-empty proper subset of the vertices")

    mask = np.zeros(n)
    mask[target_list] = 1.0

    def deriv(psi: np.ndarray) -> np.ndarray:
        # H psi for the complete graph, O(N): A psi = sum(psi) - psi.
        h_psi = -gamma * (psi.sum() - psi) - mask * psi
        return -1j * h_psi

    n_steps = max(1, math.ceil(total_time / dt)) if total_time > 0 else 0
    step = total_time / n_steps if n_steps else 0.0
    stride = max(1, math.ceil(n_steps / 1000))

    psi = np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)
    times = [0.0]
    probs = [float(np.sum(np.abs(psi[target_list]) ** 2))]
    renorms = 0
    max_drift = 0.0
    for k in range(1, n_steps + 1):
        k1 = deriv(psi)
        k2 = deriv(psi + 0.5 * step * k1)
        k3 = deriv(psi + 0.5 * step * k2)
        k4 = deriv(psi + step * k3)
        psi = psi + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(float(np.linalg.norm(psi)) - 1.0)
        max_drift = max(max_drift, drift)
        if drift > 1e-12:
            psi = psi / np.linalg.norm(psi)
            renorms += 1
        if k % stride == 0 or k == n_steps:
            times.append(k * step)
            probs.append(float(np.sum(np.abs(psi[target_list]) ** 2)))
    return CtqwTrajectory(tuple(times), tuple(probs), step, renorms, max_drift)


# ---------------------------------------------------------------------------
# Coined discrete-time walk on tori
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WalkState:
    """Coined-walk amplitudes, shape (V, degree), one row per vertex."""

    graph: Graph
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        expected = (self.graph.vertex_count, self.graph.degree)
        if amps.shape != expected:
            raise ValueError(f"amplitude array has shape {amps.shape}, expected {expected}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def vertex_probabilities(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def marked_probability(self, marked: Iterable[int]) -> float:
        idx = list(marked)
        if not idx:
            return 0.0
        return float(np.sum(np.abs(self.amplitudes[idx, :]) ** 2))


def uniform_walk_state(graph: Graph) -> WalkState:
    _require_torus(graph)
    v, d = graph.vertex_count, graph.degree
    return WalkState(graph, np.full((v, d), 1.0 / math.sqrt(v * d), dtype=np.complex128))


def localized_walk_state(graph: Graph, vertex: int) -> WalkState:
    """All amplitude on one vertex, spread uniformly over its coin directions."""
    _require_torus(graph)
    if not 0 <= vertex < graph.vertex_count:
        raise ValueError(f"vertex {vertex} out of range")
    amps = np.zeros((graph.vertex_count, graph.degree), dtype=np.complex128)
    amps[vertex, :] = 1.0 / math.sqrt(graph.degree)
    return WalkState(graph, amps)


def _require_torus(graph: Graph) -> None:
    if graph.kind not in (KIND_TORUS_1D, KIND_TORUS_2D):
        raise ValueError("the coined walk runs on 1-D or 2-D tori (degree-regular by construction)")


def _flip_flop_shift(graph: Graph, amps: np.ndarray) -> np.ndarray:
    # Move each amplitude along its direction and reverse the direction label.
    if graph.kind == KIND_TORUS_1D:
        out = np.empty_like(amps)
        out[:, 1] = np.roll(amps[:, 0], 1)   # travelling +x arrives pointing -x
        out[:, 0] = np.roll(amps[:, 1], -1)
        return out
    width, height = graph.dims
    grid = amps.reshape(width, height, 4)
    out = np.empty_like(grid)
    out[:, :, 1] = np.roll(grid[:, :, 0], 1, axis=0)
    out[:, :, 0] = np.roll(grid[:, :, 1], -1, axis=0)
    out[:, :, 3] = np.roll(grid[:, :, 2], 1, axis=1)
    out[:, :, 2] = np.roll(grid[:, :, 3], -1, axis=1)
    return out.reshape(amps.shape)


def dtqw_step(
    state: WalkState,
    marked: Iterable[int] = (),
    mark_phase: float = math.pi,
) -> WalkState:
    """One coined-walk step: mark, Grover coin at every vertex, flip-flop shift.

    Marking multiplies all coin amplitudes at the marked vertices by
    e^{i*mark_phase}; with mark_phase = 0 (or no marked vertices) the step is
    the plain translation-covariant walk.
    """
    graph = state.graph
    _require_torus(graph)
    amps = state.amplitudes.copy()
    idx = sorted({int(v) for v in marked})
    if idx and (idx[0] < 0 or idx[-1] >= graph.vertex_count):
        raise ValueError("marked vertex out of range")
    if idx and mark_phase != 0.0:
        amps[idx, :] *= -1.0 if mark_phase == math.pi else cmath.exp(1j * mark_phase)
    # Grover coin: reflection about the per-vertex uniform coin state.
    amps = 2.0 * amps.mean(axis=1, keepdims=True) - amps
    return WalkState(graph, _flip_flop_shift(graph, amps))


@dataclass(frozen=True, eq=False)
class WalkTrajectory:
    """Marked-set probability of a coined walk after 0, 1, 2, ... steps."""

    probabilities: tuple[float, ...]
    final_state: WalkState
    max_norm_drift: float

    def records(self) -> list[tuple[int, float]]:
        return list(enumerate(self.probabilities))

    def peak(self) -> tuple[int, float]:
        k = int(np.argmax(self.probabilities))
        return k, self.probabilities[k]


def dtqw_search(
    graph: Graph,
    marked: Iterable[int],
    steps: int,
    mark_phase: float = math.pi,
    initial: WalkState | None = None,
) -> WalkTrajectory:
    """Run the coined search walk from the uniform state (or ``initial``)."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = initial if initial is not None else uniform_walk_state(graph)
    if state.graph.kind != graph.kind or state.graph.dims != graph.dims:
        raise ValueError("initial state was built for a different graph")
    marked_list = sorted({int(v) for v in marked})
    probs = [state.marked_probability(marked_list)]
    max_drift = abs(math.sqrt(state.norm_squared()) - 1.0)
    for _ in range(steps):
        state = dtqw_step(state, marked_list, mark_phase)
        probs.append(state.marked_probability(marked_list))
        max_drift = max(max_drift, abs(math.sqrt(state.norm_squared()) - 1.0))
    return WalkTrajectory(tuple(probs), state, max_drift)


# ---------------------------------------------------------------------------
# Multiple marked vertices on the complete graph: periodic revival
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RevivalResult:
    """First two success peaks of a multi-target run and their spacing."""

    trajectory: grover.Trajectory
    period_estimate: int
    first_peak: tuple[int, float]
    second_peak: tuple[int, float]

    @property
    def revival_ratio(self) -> float:
        return self.second_peak[1] / self.first_peak[1]


def multi_target_revival(graph: Graph, targets: Iterable[int], steps: int) -> RevivalResult:
    """Iterate with several same-phase marked vertices and measure the revival.

    The marked set must satisfy 2 <= M < V/2 (at M = V/2 the rotation angle
    degenerates and the success probability is constant).  At least
    ceil(10*sqrt(V/M)) iterations are simulated so the first two peaks, about
    pi/2 * sqrt(V/M) apart, always fit; the run fails loudly if they do not,
    or if the second peak collapses below 0.95 of the first.
    """
    if graph.kind != KIND_COMPLETE:
        raise ValueError("multi-target revival runs on the complete graph")
    target_set = frozenset(int(t) for t in targets)
    v = graph.vertex_count
    m = len(target_set)
    if m < 2 or not m < v / 2:
        raise ValueError(f"need 2 <= M < V/2 marked vertices, got M={m}, V={v}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    horizon = math.ceil(10.0 * math.sqrt(v / m))
    trajectory = grover.run(grover.SearchSpec(v, target_set), max(steps, horizon))
    p = trajectory.probabilities
    peaks: list[int] = []
    for k in range(1, len(p) - 1):
        if p[k] >= p[k - 1] and p[k] >= p[k + 1]:
            if peaks and k == peaks[-1] + 1 and p[k] == p[peaks[-1]]:
                continue  # plateau, already counted
            peaks.append(k)
            if len(peaks) == 2:
                break
    if len(peaks) < 2 or peaks[1] > horizon:
        raise PeakDetectionError(f"did not find two success peaks within {horizon} iterations")
    first = (peaks[0], p[peaks[0]])
    second = (peaks[1], p[peaks[1]])
    if second[1] < 0.95 * first[1]:
        raise RevivalError(f"second peak {second[1]:.6f} fell below 0.95 of the first {first[1]:.6f}")
    return RevivalResult(trajectory, peaks[1] - peaks[0], first, second)
