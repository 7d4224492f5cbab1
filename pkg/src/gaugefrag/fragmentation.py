"""Casimir-cutoff effective Hamiltonians, Krylov sectors, and the
second-order Schrieffer-Wolff machinery."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import NumericalError
from .operator import SymmetricOperator
from .u1 import U1Space, build_u1_hamiltonian, build_u1_space

__all__ = [
    "SectorReport",
    "u1_frozen_patterns",
    "su2_frozen_patterns",
    "effective_hamiltonian",
    "krylov_sectors",
    "sector_scaling",
    "sw_split",
    "sw_second_order",
    "sw_frozen_channel_norm",
    "sw_error_scaling_u1",
    "sw_coupling_scaling_u1",
]

EDGE_TOL = 1e-14


def u1_frozen_patterns(space: U1Space, cutoff: float) -> tuple:
    """Frozen pattern per basis state: {(p, n_p) : n_p^2 >= cutoff^2}.

    Link labels are the gauge-fixed upper-link fields; the Casimir of flux n
    is n^2.
    """
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    threshold = cutoff * cutoff
    patterns = []
    for row in space.configs:
        patterns.append(
            frozenset(
                (p, int(n)) for p, n in enumerate(row) if n * n >= threshold
            )
        )
    return tuple(patterns)


def su2_frozen_patterns(labels: np.ndarray, cutoff: float) -> tuple:
    """Frozen pattern per link-representation basis state.

    ``labels[k, l]`` is the spin j on link l (see link_representation_basis);
    the Casimir is j(j+1).
    """
    if cutoff <= 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    threshold = cutoff * cutoff
    patterns = []
    for row in labels:
        patterns.append(
            frozenset(
                (l, float(j))
                for l, j in enumerate(row)
                if j * (j + 1.0) >= threshold
            )
        )
    return tuple(patterns)


def _pattern_ids(patterns) -> np.ndarray:
    seen: dict = {}
    ids = np.empty(len(patterns), dtype=np.int64)
    for k, pat in enumerate(patterns):
        ids[k] = seen.setdefault(pat, len(seen))
    return ids


def effective_hamiltonian(op: SymmetricOperator, patterns) -> SymmetricOperator:
    """Zero every off-diagonal element between states of unequal pattern.

    The diagonal and all within-pattern elements are copied unchanged, so the
    operation is exact and idempotent.
    """
    if len(patterns) != op.dim:
        raise ValueError(
            f"{len(patterns)} patterns for operator of dimension {op.dim}"
        )
    ids = _pattern_ids(patterns)
    coo = op.matrix.tocoo()
    keep = (coo.row == coo.col) | (ids[coo.row] == ids[coo.col])
    mat = sp.coo_matrix(
        (coo.data[keep], (coo.row[keep], coo.col[keep])), shape=coo.shape
    ).tocsr()
    return SymmetricOperator(mat, name=f"{op.name}|frozen")


@dataclass(frozen=True)
class SectorReport:
    """Connected components of the off-diagonal transition graph."""

    cutoff: float | None
    labels: np.ndarray = field(repr=False, compare=False)
    sizes: tuple = ()
    representatives: tuple = ()

    @property
    def n_sectors(self) -> int:
        return len(self.sizes)

    @property
    def largest(self) -> int:
        return max(self.sizes)

    @property
    def histogram(self) -> dict:
        return dict(sorted(Counter(self.sizes).items()))

    @property
    def dimension(self) -> int:
        return len(self.labels)


def krylov_sectors(
    op: SymmetricOperator,
    cutoff: float | None = None,
    edge_tol: float = EDGE_TOL,
) -> SectorReport:
    """Sector decomposition: edges wherever |H_ij| > edge_tol, i != j."""
    coo = op.matrix.tocoo()
    off = (coo.row != coo.col) & (np.abs(coo.data) > edge_tol)
    graph = sp.coo_matrix(
        (np.ones(off.sum()), (coo.row[off], coo.col[off])), shape=coo.shape
    )
    n, raw = connected_components(graph.tocsr(), directed=False)
    # relabel components by their smallest member for reorder invariance
    first = np.full(n, len(raw), dtype=np.int64)
    for k, lab in enumerate(raw):
        if k < first[lab]:
            first[lab] = k
    order = np.argsort(first)
    remap = np.empty(n, dtype=np.int64)
    remap[order] = np.arange(n)
    labels = remap[raw]
    sizes = tuple(int(s) for s in np.bincount(labels))
    reps = tuple(int(f) for f in np.sort(first))
    return SectorReport(
        cutoff=cutoff, labels=labels, sizes=sizes, representatives=reps
    )


@dataclass(frozen=True)
class SectorScaling:
    """Sector counts over a family of lattice lengths plus the fitted rate."""

    rows: tuple  # (length, dimension, sector_count, largest_sector)
    growth_rate: float  # fitted slope of ln(count) vs length


def sector_scaling(
    truncation: int,
    cutoff: float,
    lengths,
    g: float = 1.0,
) -> SectorScaling:
    """Krylov sector counts of the cutoff Hamiltonian per lattice length."""
    rows = []
    for length in lengths:
        space = build_u1_space(length, truncation)
        ham = build_u1_hamiltonian(space, g)
        patterns = u1_frozen_patterns(space, cutoff)
        report = krylov_sectors(effective_hamiltonian(ham, patterns), cutoff)
        rows.append((length, space.dim, report.n_sectors, report.largest))
    lengths_arr = np.array([r[0] for r in rows], dtype=float)
    counts = np.array([r[2] for r in rows], dtype=float)
    if len(rows) >= 2 and np.all(counts > 0):
        rate = float(np.polyfit(lengths_arr, np.log(counts), 1)[0])
    else:
        rate = float("nan")
    return SectorScaling(rows=tuple(rows), growth_rate=rate)


def sw_split(op: SymmetricOperator, patterns) -> tuple:
    """Exact additive split H = H0 + V at the frozen-pattern boundary."""
    h0 = effective_hamiltonian(op, patterns)
    v = (op.matrix - h0.matrix).tocsr()
    v.eliminate_zeros()
    return h0, SymmetricOperator(v, name=f"{op.name}|offblock")


def sw_second_order(
    h0: SymmetricOperator,
    v: SymmetricOperator,
    gap_tol: float = 1e-8,
    block_project: bool = True,
) -> SymmetricOperator:
    """H0 + (1/2)[S, V] with [S, H0] + V = 0, assembled in the H0 eigenbasis.

    <i| (1/2)[S,V] |f> = (1/2) sum_k V_ik V_kf (1/(E_i - E_k) - 1/(E_k - E_f)).

    Requires V strictly off-block-diagonal over the H0 eigenspaces: any V
    element between levels closer than ``gap_tol`` raises (resonance). With
    ``block_project`` only correction elements within quasi-degenerate H0
    levels are kept (standard block convention); disable it to obtain the raw
    formula for comparison.
    """
    if h0.dim != v.dim:
        raise ValueError(f"dimension mismatch {h0.dim} != {v.dim}")
    h0.assert_hermitian(1e-12)
    v.assert_hermitian(1e-12)
    energies, rot = np.linalg.eigh(h0.toarray())
    vd = rot.T @ v.toarray() @ rot
    vd = 0.5 * (vd + vd.T)
    delta = energies[:, None] - energies[None, :]
    degenerate = np.abs(delta) < gap_tol
    vscale = max(1.0, np.abs(vd).max())
    resonant = degenerate & (np.abs(vd) > 1e-12 * vscale)
    if resonant.any():
        i, k = np.argwhere(resonant)[0]
        raise NumericalError(
            f"resonance: V couples degenerate H0 levels {i} and {k} "
            f"(E={energies[i]:.6g}, |V|={abs(vd[i, k]):.3e})"
        )
    with np.errstate(divide="ignore"):
        dinv = np.where(degenerate, 0.0, 1.0 / np.where(degenerate, 1.0, delta))
    a = vd * dinv
    corr = 0.5 * (a @ vd - vd @ a)
    if block_project:
        cluster = np.zeros(len(energies), dtype=np.int64)
        if len(energies) > 1:
            cluster[1:] = np.cumsum(np.diff(energies) > gap_tol)
        corr = np.where(cluster[:, None] == cluster[None, :], corr, 0.0)
    back = rot @ corr @ rot.T
    mat = h0.matrix + sp.csr_matrix(0.5 * (back + back.T))
    return SymmetricOperator(mat.tocsr(), name=f"{h0.name}+sw2")


def sw_frozen_channel_norm(
    space: U1Space, g: float, cutoff: float, gap_tol: float = 1e-8
) -> float:
    """Max |element| of the second-order correction in the pattern-changing
    channel: residual coupling between Krylov sectors after the rotation."""
    ham = build_u1_hamiltonian(space, g)
    patterns = u1_frozen_patterns(space, cutoff)
    h0, v = sw_split(ham, patterns)
    if v.matrix.nnz == 0:
        return 0.0
    h2 = sw_second_order(h0, v, gap_tol=gap_tol)
    diff = np.asarray((h2.matrix - h0.matrix).todense())
    ids = _pattern_ids(patterns)
    changing = ids[:, None] != ids[None, :]
    if not changing.any():
        return 0.0
    return float(np.abs(diff[changing]).max())


def _fit_power(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    good = ys > 0
    if good.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs[good]), np.log(ys[good]), 1)[0])


def sw_error_scaling_u1(
    length: int, truncation: int, g: float, cutoffs
) -> tuple:
    """Frozen-channel correction norm per cutoff, with the fitted decay power.

    Returns (rows, decay_power) where rows are (cutoff, norm) and the norm is
    fitted as cutoff**(-decay_power).
    """
    space = build_u1_space(length, truncation)
    rows = [(float(c), sw_frozen_channel_norm(space, g, c)) for c in cutoffs]
    power = _fit_power([r[0] for r in rows], [r[1] for r in rows])
    return tuple(rows), -power if power == power else float("nan")


def sw_coupling_scaling_u1(
    length: int, truncation: int, g_values, cutoff: float
) -> tuple:
    """Frozen-channel correction norm per coupling at fixed cutoff.

    Returns (rows, g_power) where rows are (g, norm) and the norm is fitted
    as g**g_power (expected near -6 for the plaquette channel).
    """
    space = build_u1_space(length, truncation)
    rows = [(float(g), sw_frozen_channel_norm(space, g, cutoff)) for g in g_values]
    power = _fit_power([r[0] for r in rows], [r[1] for r in rows])
    return tuple(rows), power
