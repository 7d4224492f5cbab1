"""Gauge-fixed basis and operators for the truncated U(1) plaquette ladder.

Basis states are tuples (n_1, ..., n_L) of upper-link electric fields, one
integer per plaquette, with |n_p| <= truncation. The two horizontal links of
plaquette p carry fields +-n_p and the vertical link between plaquettes p and
p+1 carries n_p - n_{p+1}; the chain is periodic in p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .operator import SymmetricOperator

__all__ = [
    "U1Space",
    "MomentumSector",
    "build_u1_space",
    "build_u1_hamiltonian",
    "build_momentum_zero",
    "project_operator",
    "counter_P",
    "counter_P_symmetric",
    "counter_D",
    "electric_energy_total",
    "electric_energy_upper",
    "shift_permutation",
]

# Index arrays are int64; leave headroom below 2^63.
_MAX_DIM = 2**62


@dataclass(frozen=True)
class U1Space:
    """Complete indexed basis of the ladder at fixed length and truncation.

    ``configs[k]`` is the k-th basis state; ordering is lexicographic in
    (n_1, ..., n_L) with n running over {-truncation, ..., truncation}.
    """

    length: int
    truncation: int
    configs: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.configs.shape[0]

    @property
    def local_dim(self) -> int:
        return 2 * self.truncation + 1

    def config(self, k: int) -> tuple:
        return tuple(int(n) for n in self.configs[k])

    def index(self, config: Sequence[int]) -> int:
        """Ordinal of a configuration (inverse of ``config``)."""
        c = np.asarray(config, dtype=np.int64)
        if c.shape != (self.length,):
            raise ValueError(
                f"expected {self.length} plaquette fields, got shape {c.shape}"
            )
        if np.abs(c).max(initial=0) > self.truncation:
            raise ValueError(
                f"field exceeds truncation {self.truncation}: {tuple(c)}"
            )
        base = self.local_dim
        powers = base ** np.arange(self.length - 1, -1, -1, dtype=np.int64)
        return int((c + self.truncation) @ powers)

    def basis_vector(self, config: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.index(config)] = 1.0
        return v


def build_u1_space(length: int, truncation: int) -> U1Space:
    """Enumerate all (2*truncation+1)^length ladder configurations.

    Raises if the basis cannot be indexed by int64 (the error reports the
    required capacity).
    """
    if length < 2:
        raise ValueError(f"need at least 2 plaquettes, got {length}")
    if truncation < 1:
        raise ValueError(f"truncation must be >= 1, got {truncation}")
    base = 2 * truncation + 1
    dim = base**length  # exact (Python int)
    if dim > _MAX_DIM:
        raise ValueError(
            f"basis of {dim} states needs {dim.bit_length()} index bits, "
            f"exceeding the {_MAX_DIM.bit_length()}-bit capacity of int64 indices"
        )
    digits = np.unravel_index(np.arange(dim, dtype=np.int64), (base,) * length)
    configs = np.stack(digits, axis=1).astype(np.int64) - truncation
    return U1Space(length=length, truncation=truncation, configs=configs)


def _index_powers(space: U1Space) -> np.ndarray:
    base = space.local_dim
    return base ** np.arange(space.length - 1, -1, -1, dtype=np.int64)


def build_u1_hamiltonian(space: U1Space, g: float) -> SymmetricOperator:
    """Ladder Hamiltonian in the gauge-fixed plaquette basis.

    Diagonal: g^2 * sum_p [n_p^2 + (n_p - n_{p+1})^2 / 2] with periodic p.
    Off-diagonal: -1/(2 g^2) between configurations differing by +-1 on one
    plaquette; raising past |n| = truncation is annihilated (hard cutoff).
    """
    if g <= 0:
        raise ValueError(f"coupling must be positive, got g={g}")
    n = space.configs
    diff = n - np.roll(n, -1, axis=1)
    diag = g * g * ((n * n).sum(axis=1) + 0.5 * (diff * diff).sum(axis=1))

    rows = [np.arange(space.dim, dtype=np.int64)]
    cols = [np.arange(space.dim, dtype=np.int64)]
    vals = [diag.astype(np.float64)]
    hop = -1.0 / (2.0 * g * g)
    powers = _index_powers(space)
    idx = np.arange(space.dim, dtype=np.int64)
    for p in range(space.length):
        raisable = n[:, p] < space.truncation
        i = idx[raisable]
        j = i + powers[p]
        v = np.full(i.shape, hop)
        rows.extend([i, j])
        cols.extend([j, i])
        vals.extend([v, v])
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.dim, space.dim),
    ).tocsr()
    return SymmetricOperator(mat, name=f"H[u1 L={space.length} g={g}]")


def _diagonal_operator(diag: np.ndarray, name: str) -> SymmetricOperator:
    mat = sp.diags(diag.astype(np.float64), format="csr")
    return SymmetricOperator(mat, name=name)


def counter_P(space: U1Space, s: int) -> SymmetricOperator:
    """Counts plaquettes whose upper-link field equals s exactly (signed)."""
    if abs(s) > space.truncation:
        raise ValueError(f"|s|={abs(s)} outside truncation {space.truncation}")
    diag = (space.configs == s).sum(axis=1)
    return _diagonal_operator(diag, name=f"P({s})")


def counter_P_symmetric(space: U1Space, s: int) -> SymmetricOperator:
    """P(s) + P(-s): counts plaquettes with field magnitude |s| (s >= 0)."""
    if s < 0:
        raise ValueError(f"symmetrized counter takes s >= 0, got {s}")
    if s > space.truncation:
        raise ValueError(f"s={s} outside truncation {space.truncation}")
    target = np.abs(space.configs) == s
    diag = target.sum(axis=1)
    return _diagonal_operator(diag, name=f"Psym({s})")


def counter_D(space: U1Space, s: int) -> SymmetricOperator:
    """Counts periodic neighbor pairs with |n_p - n_{p+1}| = s."""
    if not 0 <= s <= 2 * space.truncation:
        raise ValueError(f"s={s} outside range 0..{2 * space.truncation}")
    diff = np.abs(space.configs - np.roll(space.configs, -1, axis=1))
    diag = (diff == s).sum(axis=1)
    return _diagonal_operator(diag, name=f"D({s})")


def electric_energy_total(space: U1Space) -> SymmetricOperator:
    """Sum of E^2 over all three links per plaquette cell.

    Both horizontal links carry n_p, the right vertical link n_p - n_{p+1}:
    sum_p [2 n_p^2 + (n_p - n_{p+1})^2].
    """
    n = space.configs
    diff = n - np.roll(n, -1, axis=1)
    diag = 2 * (n * n).sum(axis=1) + (diff * diff).sum(axis=1)
    return _diagonal_operator(diag, name="electric-total")


def electric_energy_upper(space: U1Space) -> SymmetricOperator:
    """Sum of E^2 over upper horizontal links only: sum_p n_p^2."""
    diag = (space.configs * space.configs).sum(axis=1)
    return _diagonal_operator(diag, name="electric-upper")


def shift_permutation(space: U1Space) -> np.ndarray:
    """perm[k] = index of the cyclic shift (n_1..n_L) -> (n_L, n_1..n_{L-1})."""
    shifted = np.roll(space.configs, 1, axis=1)
    powers = _index_powers(space)
    return (shifted + space.truncation) @ powers


@dataclass(frozen=True)
class MomentumSector:
    """Zero-momentum (translation-symmetric) sector of a U1Space.

    One basis vector per translation orbit, amplitude 1/sqrt(|orbit|) on each
    member. ``embedding`` maps sector coordinates to full-space coordinates.
    """

    space: U1Space
    orbits: tuple = field(repr=False, compare=False)
    embedding: sp.csr_matrix = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.embedding.shape[1]

    def embed(self, vec: np.ndarray) -> np.ndarray:
        """Lift a sector vector to the full tensor-product basis."""
        return self.embedding @ vec

    def orbit_of(self, sector_index: int) -> np.ndarray:
        return self.orbits[sector_index]


def build_momentum_zero(space: U1Space) -> MomentumSector:
    """Group the basis into translation orbits and build the k=0 embedding."""
    perm = shift_permutation(space)
    visited = np.zeros(space.dim, dtype=bool)
    orbits = []
    for k in range(space.dim):
        if visited[k]:
            continue
        members = [k]
        visited[k] = True
        j = int(perm[k])
        while j != k:
            visited[j] = True
            members.append(j)
            j = int(perm[j])
        orbits.append(np.array(sorted(members), dtype=np.int64))
    rows = np.concatenate(orbits)
    cols = np.concatenate(
        [np.full(len(o), i, dtype=np.int64) for i, o in enumerate(orbits)]
    )
    vals = np.concatenate([np.full(len(o), 1.0 / np.sqrt(len(o))) for o in orbits])
    emb = sp.coo_matrix(
        (vals, (rows, cols)), shape=(space.dim, len(orbits))
    ).tocsr()
    return MomentumSector(space=space, orbits=tuple(orbits), embedding=emb)


def project_operator(
    op: SymmetricOperator,
    sector: MomentumSector,
    check: bool = True,
    tol: float = 1e-10,
) -> SymmetricOperator:
    """Restrict a translation-invariant operator to the k=0 sector.

    With ``check`` the operator is verified to commute with the cyclic shift;
    failure reports the violating norm.
    """
    m = op.matrix
    if m.shape[0] != sector.space.dim:
        raise ValueError(
            f"operator dim {m.shape[0]} != space dim {sector.space.dim}"
        )
    if check:
        perm = shift_permutation(sector.space)
        shifted = m[perm, :][:, perm]
        d = shifted - m
        viol = 0.0 if d.nnz == 0 else float(np.abs(d.data).max())
        if viol > tol:
            raise ValueError(
                f"{op.name} does not commute with translation: "
                f"max |T op T^-1 - op| = {viol:.3e} > {tol:.1e}"
            )
    emb = sector.embedding
    projected = (emb.T @ (m @ emb)).tocsr()
    sym = (projected + projected.T) * 0.5
    return SymmetricOperator(sym.tocsr(), name=f"{op.name}|k=0")
