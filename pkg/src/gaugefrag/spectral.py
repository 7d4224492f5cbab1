"""Spectral machinery: eigendecomposition, evolution, microcanonical states,
observable statistics and half-chain entanglement entropy."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .operator import SymmetricOperator
from .u1 import U1Space

__all__ = [
    "SpectralData",
    "QuenchRecord",
    "diagonalize",
    "evolve",
    "observable_series",
    "microcanonical_state",
    "observable_stats",
    "half_chain_entropy",
    "degenerate_clusters",
]

RESIDUAL_TOL = 1e-8
ORTHO_TOL = 1e-10
NORM_DRIFT_TOL = 1e-10
DEGENERACY_GAP = 1e-9

# Full Gram-matrix orthonormality checks are O(dim^3); above this dimension
# a random column sample is checked instead.
_FULL_ORTHO_DIM = 2048


@dataclass(frozen=True)
class SpectralData:
    """Full eigendecomposition: ascending energies, orthonormal columns."""

    energies: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def coefficients(self, state: np.ndarray) -> np.ndarray:
        """Expansion coefficients of a state in the eigenbasis."""
        return self.vectors.T @ state


@dataclass(frozen=True)
class QuenchRecord:
    """One observable under two initial states on a common time grid."""

    times: np.ndarray
    obs_quench: np.ndarray
    obs_micro: np.ndarray
    observable: str
    quench_label: str
    micro_label: str

    def __post_init__(self):
        if not (len(self.times) == len(self.obs_quench) == len(self.obs_micro)):
            raise ValueError("time grid and series lengths differ")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


def diagonalize(
    op: SymmetricOperator,
    validate: bool = True,
    symmetry_tol: float = 1e-12,
) -> SpectralData:
    """Full symmetric eigendecomposition of a SymmetricOperator.

    Residuals ||H v - E v|| <= 1e-8 * max(1, |E|) and orthonormality are
    verified when ``validate`` is set; failures raise NumericalError.
    """
    asym = op.max_asymmetry()
    if asym > symmetry_tol:
        raise ValueError(
            f"{op.name}: asymmetry {asym:.3e} exceeds {symmetry_tol:.1e}"
        )
    dense = op.toarray()
    if np.iscomplexobj(dense):
        raise ValueError(f"{op.name}: full decomposition expects a real matrix")
    energies, vectors = scipy.linalg.eigh(dense)
    if validate:
        resid = op.matrix @ vectors - vectors * energies
        worst = np.linalg.norm(resid, axis=0)
        limit = RESIDUAL_TOL * np.maximum(1.0, np.abs(energies))
        if np.any(worst > limit):
            k = int(np.argmax(worst - limit))
            raise NumericalError(
                f"eigenpair {k} residual {worst[k]:.3e} exceeds {limit[k]:.3e}"
            )
        n = vectors.shape[1]
        if n <= _FULL_ORTHO_DIM:
            gram = vectors.T @ vectors
        else:
            rng = np.random.default_rng(0)
            cols = rng.choice(n, size=256, replace=False)
            gram = vectors[:, cols].T @ vectors[:, cols]
        err = np.abs(gram - np.eye(gram.shape[0])).max()
        if err > ORTHO_TOL:
            raise NumericalError(f"orthonormality violation {err:.3e}")
    return SpectralData(energies=energies, vectors=vectors)


def evolve(spec: SpectralData, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """States psi(t) = sum_k e^{-i E_k t} <v_k|psi0> v_k, one row per time.

    Norm preservation is enforced to 1e-10 at every grid point.
    """
    psi0 = np.asarray(psi0)
    if psi0.shape != (spec.dim,):
        raise ValueError(f"state shape {psi0.shape} does not match dim {spec.dim}")
    c0 = spec.vectors.T @ psi0
    phases = np.exp(-1j * np.outer(np.asarray(times), spec.energies))
    states = (phases * c0) @ spec.vectors.T
    norms = np.linalg.norm(states, axis=1)
    drift = np.abs(norms - np.linalg.norm(psi0)).max()
    if drift > NORM_DRIFT_TOL:
        raise NumericalError(f"evolution norm drift {drift:.3e}")
    return states


def observable_series(
    spec: SpectralData,
    psi0: np.ndarray,
    times: np.ndarray,
    diag_obs: np.ndarray,
) -> np.ndarray:
    """<psi(t)| O |psi(t)> for a basis-diagonal observable O.

    Batched over the time grid without materializing a complex copy of the
    eigenvector matrix; used for the large quench runs.
    """
    c0 = spec.vectors.T @ np.asarray(psi0, dtype=np.float64)
    phases = np.exp(-1j * np.outer(spec.energies, np.asarray(times)))
    coeff = phases * c0[:, None]
    re = spec.vectors @ np.ascontiguousarray(coeff.real)
    im = spec.vectors @ np.ascontiguousarray(coeff.imag)
    dens = re * re + im * im
    norms = dens.sum(axis=0)
    if np.abs(norms - norms[0]).max() > NORM_DRIFT_TOL:
        raise NumericalError("evolution norm drift in observable series")
    return diag_obs @ dens


def microcanonical_state(
    spec: SpectralData, energy: float, half_width: float
) -> np.ndarray:
    """Equal superposition of eigenstates with |E_k - energy| <= half_width."""
    if half_width <= 0:
        raise ValueError(f"window half-width must be positive, got {half_width}")
    mask = np.abs(spec.energies - energy) <= half_width
    count = int(mask.sum())
    if count == 0:
        nearest = spec.energies[np.argmin(np.abs(spec.energies - energy))]
        raise ValueError(
            f"no eigenvalue within {half_width} of {energy}; nearest is {nearest}"
        )
    return spec.vectors[:, mask].sum(axis=1) / np.sqrt(count)


def window_member_count(spec: SpectralData, energy: float, half_width: float) -> int:
    return int((np.abs(spec.energies - energy) <= half_width).sum())


def observable_stats(
    spec: SpectralData, op: SymmetricOperator
) -> tuple[np.ndarray, np.ndarray]:
    """Per-eigenstate mean and variance of an observable.

    Variance uses <v|op^2|v> = ||op v||^2, valid for Hermitian op.
    """
    if op.dim != spec.dim:
        raise ValueError(f"operator dim {op.dim} != spectral dim {spec.dim}")
    ov = op.matrix @ spec.vectors
    means = np.einsum("ij,ij->j", spec.vectors, ov)
    second = np.einsum("ij,ij->j", ov, ov)
    return means, second - means * means


def half_chain_entropy(state: np.ndarray, space: U1Space, cut: int) -> float:
    """Von Neumann entropy (nats) of plaquettes {1..cut} for a full-space state.

    Momentum-sector states must be embedded into the full basis first.
    """
    if not 0 < cut < space.length:
        raise ValueError(f"cut must be in 1..{space.length - 1}, got {cut}")
    state = np.asarray(state)
    if state.shape != (space.dim,):
        raise ValueError(f"state shape {state.shape} does not match space")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state norm {norm} deviates from 1 by more than 1e-8")
    d = space.local_dim
    amp = state.reshape(d**cut, d ** (space.length - cut))
    s = scipy.linalg.svd(amp, compute_uv=False)
    p = s * s
    p = p[p > 1e-300]
    return float(-(p * np.log(p)).sum())


def degenerate_clusters(energies: np.ndarray, gap: float = DEGENERACY_GAP) -> np.ndarray:
    """Cluster id per ascending eigenvalue; a new cluster opens at gaps > gap."""
    energies = np.asarray(energies)
    ids = np.zeros(len(energies), dtype=np.int64)
    if len(energies) > 1:
        ids[1:] = np.cumsum(np.diff(energies) > gap)
    return ids
