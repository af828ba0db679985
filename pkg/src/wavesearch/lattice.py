"""Nearest-neighbour chains: spectra, impurity bound states, disorder statistics.

Everything lives in the one-particle sector, so a chain of L sites is just a
real symmetric L x L matrix with the site energies on the diagonal and -t on
the nearest-neighbour couplings.  A single attractive site pulls exactly one
level out of the band and localizes it; dense site-energy disorder localizes
every state, which we quantify with the inverse participation ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Dense-solver budget: all claims here are checkable at this scale in seconds.
MAX_DENSE_SIZE = 4096

BOUNDARY_OPEN = "open"
BOUNDARY_PERIODIC = "periodic"


class NoBoundStateError(RuntimeError):
    """No isolated level found outside the band (impurity too weak for the chain length)."""


@dataclass(frozen=True, eq=False)
class TightBindingSpec:
    """Chain of ``length`` sites with hopping ``hopping`` and per-site energies."""

    length: int
    hopping: float
    on_site: np.ndarray
    boundary: str

    def __post_init__(self) -> None:
        on_site = np.array(self.on_site, dtype=np.float64, copy=True).reshape(-1)
        on_site.flags.writeable = False
        object.__setattr__(self, "on_site", on_site)


def build_chain(length: int, hopping: float, on_site=0.0, boundary: str = BOUNDARY_OPEN) -> TightBindingSpec:
    """Validate and assemble a chain spec; scalar ``on_site`` is broadcast to all sites."""
    if length < 3:
        raise ValueError(f"chain length must be at least 3, got {length}")
    if hopping <= 0.0:
        raise ValueError(f"hopping must be positive, got {hopping}")
    if boundary not in (BOUNDARY_OPEN, BOUNDARY_PERIODIC):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    energies = np.asarray(on_site, dtype=np.float64)
    if energies.ndim == 0:
        energies = np.full(length, float(energies))
    if energies.shape != (length,):
        raise ValueError(f"on_site has {energies.size} entries for {length} sites")
    return TightBindingSpec(length, float(hopping), energies, boundary)


def hamiltonian(spec: TightBindingSpec) -> np.ndarray:
    """Realize the chain as its real symmetric matrix."""
    h = np.diag(spec.on_site.copy())
    idx = np.arange(spec.length - 1)
    h[idx, idx + 1] = -spec.hopping
    h[idx + 1, idx] = -spec.hopping
    if spec.boundary == BOUNDARY_PERIODIC:
        h[0, spec.length - 1] = -spec.hopping
        h[spec.length - 1, 0] = -spec.hopping
    return h


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Full eigendecomposition; eigenvalues ascend, eigenvectors are the columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    band_edges: tuple[float, float]


def spectrum(spec: TightBindingSpec) -> SpectrumResult:
    """Dense symmetric eigensolve with a residual guard.

    Raises if any residual ||H v - lambda v|| exceeds 1e-8 * ||H||.  The
    band_edges field holds the computed (min, max) eigenvalues; for a clean
    chain these approach the analytic band edges -2t and +2t from inside.
    """
    if spec.length > MAX_DENSE_SIZE:
        raise ValueError(f"chain length {spec.length} exceeds the dense-solver budget {MAX_DENSE_SIZE}")
    h = hamiltonian(spec)
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    scale = float(np.max(np.abs(eigenvalues)))
    residual = float(np.max(np.linalg.norm(h @ eigenvectors - eigenvectors * eigenvalues, axis=0)))
    if residual > 1e-8 * max(scale, 1e-300):
        raise RuntimeError(
            f"eigensolver residual {residual:.3e} exceeds tolerance "
            f"(||H|| ~ {scale:.3e}, length {spec.length})"
        )
    return SpectrumResult(eigenvalues, eigenvectors, (float(eigenvalues[0]), float(eigenvalues[-1])))


def ipr(vector: np.ndarray) -> float:
    """Inverse participation ratio sum(v^4) of a real unit vector.

    1/L for a perfectly extended state, 1 for a state on a single site.
    """
    v = np.asarray(vector, dtype=np.float64).reshape(-1)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"vector is not normalized (norm {norm})")
    return float(np.sum(v**4))


@dataclass(frozen=True)
class BoundStateResult:
    """Isolated level split off the band by a single impurity."""

    energy: float
    gap_below_band: float
    ipr: float


def bound_state(length: int, hopping: float, impurity: float) -> BoundStateResult:
    """Find the level an impurity of strength ``impurity`` pulls out of the band.

    The impurity sits at site length//2 of an open chain with on-site energy
    -impurity, so positive strength means an attractive well and the level
    appears below the band (above it, mirrored, for negative strength).  For
    hopping t and strength V the infinite-chain level is at -sqrt(4 t^2 + V^2);
    the chain must be long enough for the finite-size error to be negligible
    (length >= 2000 keeps it under 1e-6 for |V| >= 0.5).
    """
    if impurity == 0.0:
        raise ValueError("impurity strength must be nonzero; a clean chain has no isolated level")
    site_energies = np.zeros(length)
    site_energies[length // 2] = -impurity
    spec = build_chain(length, hopping, site_energies, BOUNDARY_OPEN)
    result = spectrum(spec)
    band_limit = 2.0 * spec.hopping
    if impurity > 0:
        outside = np.flatnonzero(result.eigenvalues < -band_limit)
    else:
        outside = np.flatnonzero(result.eigenvalues > band_limit)
    if outside.size == 0:
        raise NoBoundStateError(
            f"no level outside the band [-{band_limit}, {band_limit}] "
            f"(strength {impurity} too weak to resolve at length {length})"
        )
    if outside.size > 1:
        raise NoBoundStateError(f"expected one isolated level, found {outside.size}")
    k = int(outside[0])
    energy = float(result.eigenvalues[k])
    return BoundStateResult(energy, abs(energy) - band_limit, ipr(result.eigenvectors[:, k]))


def disorder_on_site(length: int, width: float, seed: int, trial: int) -> np.ndarray:
    """Site energies uniform on [-width/2, width/2] from a counter-based stream.

    The stream is keyed by (seed, trial), so any trial can be regenerated on
    any platform, in any order, without drawing the others.
    """
    key = np.array([seed, trial], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.uniform(-width / 2.0, width / 2.0, size=length)


@dataclass(frozen=True, eq=False)
class DisorderStats:
    """Band-center localization statistics over an ensemble of disordered chains."""

    width: float
    trials: int
    mean_ipr: float
    std_ipr: float
    seed: int
    iprs: tuple[float, ...]


def band_center_index(eigenvalues: np.ndarray) -> int:
    """Index of the eigenvalue nearest zero; ties break toward the lower index."""
    return int(np.argmin(np.abs(eigenvalues)))


def disorder_ensemble(length: int, hopping: float, width: float, trials: int, seed: int = 0) -> DisorderStats:
    """IPR of the band-center eigenstate across independent disorder draws."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if width < 0.0:
        raise ValueError(f"disorder width must be non-negative, got {width}")
    values = []
    for trial in range(trials):
        spec = build_chain(length, hopping, disorder_on_site(length, width, seed, trial))
        result = spectrum(spec)
        k = band_center_index(result.eigenvalues)
        values.append(ipr(result.eigenvectors[:, k]))
    arr = np.array(values)
    return DisorderStats(width, trials, float(arr.mean()), float(arr.std()), seed, tuple(values))
