"""Fermionic Fock space and integrated-out SU(2) chain with staggered matter.

Conventions (all signs follow from these):
  * mode index mu(v, a) = 2 v + a for site v in 0..N-1 and color a in {0, 1};
    basis states are occupation bitmasks over modes (site-major, color-minor).
  * applying an annihilation/creation factor to a basis state picks up
    (-1)**(number of occupied modes with index strictly below the acted mode);
    operator products act factor by factor, rightmost first.
  * even sites are quark sites (mass +m); odd sites are antiquark sites
    (mass -m) and are fully occupied in the staggered vacuum.

Open boundary conditions; link l sits between sites l and l+1 and carries the
cumulative color charge of sites 0..l once the gauge field is integrated out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import NumericalError
from .operator import SymmetricOperator

__all__ = [
    "FermionOp",
    "SU2Space",
    "mode_index",
    "build_su2_space",
    "staggered_vacuum",
    "build_su2_hamiltonian",
    "su2_hamiltonian_parts",
    "electric_energy",
    "site_casimir",
    "link_casimir",
    "color_charge",
    "color_charge_int",
    "total_fermion_number",
    "total_color_casimir",
    "color_singlet_projector",
    "build_phi_state",
    "link_representation_basis",
]


def mode_index(site: int, color: int) -> int:
    return 2 * site + color


@dataclass(frozen=True)
class FermionOp:
    """Scalar coefficient times a product of mode operators.

    ``factors`` are (mode, is_creation) pairs written left to right; they are
    applied right to left, so ``((p, True), (q, False))`` is chi^dag_p chi_q.
    """

    coefficient: complex
    factors: tuple

    def apply(self, bits: int):
        """Act on a basis bitmask; returns (amplitude, new_bits) or None."""
        amp = self.coefficient
        for mode, create in reversed(self.factors):
            occupied = (bits >> mode) & 1
            if create == occupied:
                return None
            below = bits & ((1 << mode) - 1)
            if below.bit_count() & 1:
                amp = -amp
            bits ^= 1 << mode
        return amp, bits


@dataclass(frozen=True)
class SU2Space:
    """Indexed Fock basis, optionally filtered to fixed total occupancy."""

    sites: int
    states: np.ndarray = field(repr=False, compare=False)
    occupancy: int | None = None

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def modes(self) -> int:
        return 2 * self.sites

    def index(self, bits: int) -> int:
        k = int(np.searchsorted(self.states, bits))
        if k == self.dim or self.states[k] != bits:
            raise ValueError(f"state {bits:#x} not in this basis")
        return k

    def basis_vector(self, bits: int) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.index(bits)] = 1.0
        return v

    def occupations(self) -> np.ndarray:
        """(dim, modes) 0/1 array of mode occupations."""
        shifts = np.arange(self.modes, dtype=np.int64)
        return (self.states[:, None] >> shifts) & 1


def build_su2_space(sites: int, occupancy: int | None = None) -> SU2Space:
    """All bitmasks over 2*sites modes, optionally at fixed total occupancy."""
    if sites < 2 or sites % 2:
        raise ValueError(f"need an even site count >= 2, got {sites}")
    modes = 2 * sites
    states = np.arange(1 << modes, dtype=np.int64)
    if occupancy is not None:
        if not 0 <= occupancy <= modes:
            raise ValueError(f"occupancy {occupancy} outside 0..{modes}")
        counts = np.zeros(states.shape, dtype=np.int64)
        for b in range(modes):
            counts += (states >> b) & 1
        states = states[counts == occupancy]
        assert len(states) == comb(modes, occupancy)
    return SU2Space(sites=sites, states=states, occupancy=occupancy)


def staggered_vacuum(space: SU2Space) -> int:
    """Bitmask with both colors occupied on every odd site, even sites empty."""
    bits = 0
    for v in range(1, space.sites, 2):
        bits |= 0b11 << (2 * v)
    if space.occupancy is not None and space.occupancy != space.sites:
        raise ValueError(
            f"vacuum has occupancy {space.sites}, basis is filtered to "
            f"{space.occupancy}"
        )
    return bits


def _operator_matrix(space: SU2Space, terms, dtype=np.int64) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for j, bits in enumerate(space.states):
        b = int(bits)
        for term in terms:
            res = term.apply(b)
            if res is None:
                continue
            amp, nb = res
            rows.append(space.index(nb))
            cols.append(j)
            vals.append(amp)
    return sp.coo_matrix(
        (np.array(vals, dtype=dtype), (rows, cols)),
        shape=(space.dim, space.dim),
    ).tocsr()


def _site_numbers(space: SU2Space) -> np.ndarray:
    occ = space.occupations()
    return occ[:, 0::2] + occ[:, 1::2]  # (dim, sites)


def _pair_weight(sites: int, v: int, w: int) -> int:
    # number of links l with max(v, w) <= l <= sites-2
    return sites - 1 - max(v, w)


def _charge_pair_flip_terms(v: int, w: int, coeff: int):
    """Off-diagonal part of 4 * sum_a Q^a_v Q^a_w for v != w (color flips)."""
    return [
        FermionOp(
            2 * coeff,
            (
                (mode_index(v, 1), True),
                (mode_index(v, 0), False),
                (mode_index(w, 0), True),
                (mode_index(w, 1), False),
            ),
        ),
        FermionOp(
            2 * coeff,
            (
                (mode_index(v, 0), True),
                (mode_index(v, 1), False),
                (mode_index(w, 1), True),
                (mode_index(w, 0), False),
            ),
        ),
    ]


def _scaled_electric(space: SU2Space, weights) -> sp.csr_matrix:
    """sum_{v,w} weights(v,w) * [4 sum_a Q^a_v Q^a_w] as an integer matrix.

    Normal-ordered expansion: the same-site part is 3(n0 + n1 - 2 n0 n1), the
    cross-site part is 2 sum_c n_{v,c} n_{w,c} - n_v n_w plus color flips.
    """
    occ = space.occupations()
    nsite = _site_numbers(space)
    diag = np.zeros(space.dim, dtype=np.int64)
    terms = []
    for v in range(space.sites):
        wv = weights(v, v)
        if wv:
            n0 = occ[:, mode_index(v, 0)]
            n1 = occ[:, mode_index(v, 1)]
            diag += wv * 3 * (n0 + n1 - 2 * n0 * n1)
        for w in range(space.sites):
            if w == v:
                continue
            wc = weights(v, w)
            if not wc:
                continue
            same = (
                occ[:, mode_index(v, 0)] * occ[:, mode_index(w, 0)]
                + occ[:, mode_index(v, 1)] * occ[:, mode_index(w, 1)]
            )
            diag += wc * (2 * same - nsite[:, v] * nsite[:, w])
            terms.extend(_charge_pair_flip_terms(v, w, wc))
    mat = sp.diags(diag, format="csr", dtype=np.int64)
    if terms:
        mat = (mat + _operator_matrix(space, terms)).tocsr()
    return mat


def su2_hamiltonian_parts(space: SU2Space):
    """Integer-scaled Hamiltonian pieces (exact arithmetic friendly).

    Returns (electric_int, kinetic_int, mass_int) with
      H_E = (g^2 / 8) * electric_int,
      H_K = (1 / 2) * kinetic_int,
      H_M = m * mass_int.
    """
    electric = _scaled_electric(
        space, lambda v, w: _pair_weight(space.sites, v, w)
    )
    hop_terms = []
    for v in range(space.sites - 1):
        for a in (0, 1):
            lo, hi = mode_index(v, a), mode_index(v + 1, a)
            hop_terms.append(FermionOp(1, ((hi, True), (lo, False))))
            hop_terms.append(FermionOp(1, ((lo, True), (hi, False))))
    kinetic = _operator_matrix(space, hop_terms)
    nsite = _site_numbers(space)
    sign = np.array([(-1) ** v for v in range(space.sites)], dtype=np.int64)
    mass = sp.diags(nsite @ sign, format="csr", dtype=np.int64)
    return electric, kinetic, mass


def build_su2_hamiltonian(space: SU2Space, g: float, m: float) -> SymmetricOperator:
    """H_E + H_K + H_M for the integrated-out open chain."""
    if g <= 0:
        raise ValueError(f"coupling must be positive, got g={g}")
    e_int, k_int, m_int = su2_hamiltonian_parts(space)
    mat = (g * g / 8.0) * e_int + 0.5 * k_int + float(m) * m_int
    return SymmetricOperator(
        mat.tocsr().astype(np.float64),
        name=f"H[su2 N={space.sites} g={g} m={m}]",
    )


def electric_energy(space: SU2Space, g: float) -> SymmetricOperator:
    """H_E alone: (g^2/2) sum_links sum_a (cumulative charge)^2."""
    if g <= 0:
        raise ValueError(f"coupling must be positive, got g={g}")
    e_int, _, _ = su2_hamiltonian_parts(space)
    return SymmetricOperator(
        ((g * g / 8.0) * e_int).tocsr().astype(np.float64),
        name="electric",
    )


def site_casimir(space: SU2Space, site: int) -> SymmetricOperator:
    """sum_a (Q^a_site)^2; eigenvalue 3/4 on singly occupied sites, else 0."""
    occ = space.occupations()
    n0 = occ[:, mode_index(site, 0)]
    n1 = occ[:, mode_index(site, 1)]
    diag = 0.75 * (n0 + n1 - 2 * n0 * n1)
    return SymmetricOperator(sp.diags(diag, format="csr"), name=f"C[site {site}]")


def link_casimir(space: SU2Space, link: int) -> SymmetricOperator:
    """sum_a (sum_{v<=link} Q^a_v)^2 for link in 0..N-2."""
    if not 0 <= link <= space.sites - 2:
        raise ValueError(f"link {link} outside 0..{space.sites - 2}")
    scaled = _scaled_electric(
        space, lambda v, w: 1 if max(v, w) <= link else 0
    )
    return SymmetricOperator(
        (scaled * 0.25).tocsr().astype(np.float64), name=f"C[link {link}]"
    )


def color_charge_int(space: SU2Space, a: int) -> sp.csr_matrix:
    """Integer-scaled total color charge: Q^a = R/2 (a in {0, 2}) or i R/2 (a=1)."""
    if a not in (0, 1, 2):
        raise ValueError(f"color component must be 0, 1 or 2, got {a}")
    if a == 2:
        occ = space.occupations()
        diag = (occ[:, 0::2] - occ[:, 1::2]).sum(axis=1)
        return sp.diags(diag, format="csr", dtype=np.int64)
    terms = []
    for v in range(space.sites):
        up, dn = mode_index(v, 0), mode_index(v, 1)
        if a == 0:
            terms.append(FermionOp(1, ((up, True), (dn, False))))
            terms.append(FermionOp(1, ((dn, True), (up, False))))
        else:  # a == 1: Q^y = (i/2) (chi^dag_dn chi_up - chi^dag_up chi_dn)
            terms.append(FermionOp(1, ((dn, True), (up, False))))
            terms.append(FermionOp(-1, ((up, True), (dn, False))))
    return _operator_matrix(space, terms)


def color_charge(space: SU2Space, a: int) -> SymmetricOperator:
    """Total color charge Q^a (Hermitian; complex for a=1)."""
    r = color_charge_int(space, a)
    mat = r.astype(np.complex128) * 0.5j if a == 1 else r.astype(np.float64) * 0.5
    return SymmetricOperator(mat.tocsr(), name=f"Q[{('x', 'y', 'z')[a]}]")


def total_fermion_number(space: SU2Space) -> SymmetricOperator:
    diag = _site_numbers(space).sum(axis=1)
    return SymmetricOperator(
        sp.diags(diag, format="csr", dtype=np.float64), name="N_f"
    )


def total_color_casimir(space: SU2Space) -> SymmetricOperator:
    """sum_a (Q^a_total)^2, assembled from integer charge matrices.

    With Q^x = R_x/2, Q^y = i R_y/2, Q^z = R_z/2 the Casimir is
    (R_x^2 - R_y^2 + R_z^2)/4, manifestly real.
    """
    rx = color_charge_int(space, 0)
    ry = color_charge_int(space, 1)
    rz = color_charge_int(space, 2)
    mat = (rx @ rx - ry @ ry + rz @ rz).astype(np.float64) * 0.25
    return SymmetricOperator(mat.tocsr(), name="Q^2")


def color_singlet_projector(space: SU2Space, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (columns) of the global color-singlet subspace.

    The smallest nonzero Casimir is 3/4, so the zero eigenspace is cleanly
    separated; used to restrict spectra to the symmetry sector of singlet
    initial states.
    """
    w, v = np.linalg.eigh(total_color_casimir(space).toarray())
    cols = v[:, np.abs(w) < tol]
    if cols.shape[1] == 0:
        raise ValueError("basis contains no color-singlet states")
    return cols


def build_phi_state(space: SU2Space, x: int, pairs: int) -> np.ndarray:
    """Quark-antiquark string state on top of the staggered vacuum.

    Applies prod_{s=0}^{pairs-1} sum_a (1/sqrt 2)(chi^dag_{x-s,a} chi_{x+s+1,a}
    + chi_{x-s,a} chi^dag_{x+s+1,a}) to the vacuum literally, fermionic signs
    included, then normalizes. ``pairs = 0`` returns the vacuum itself.
    """
    if x % 2:
        raise ValueError(f"x must be an even (quark) site, got {x}")
    if pairs < 0 or x - (pairs - 1) < 0 or x + pairs > space.sites - 1:
        raise ValueError(
            f"string x={x}, pairs={pairs} does not fit in 0..{space.sites - 1}"
        )
    amp = {staggered_vacuum(space): 1.0}
    for s in range(pairs):
        lo, hi = x - s, x + s + 1
        factors = []
        for a in (0, 1):
            factors.append(
                FermionOp(
                    1 / np.sqrt(2.0),
                    ((mode_index(lo, a), True), (mode_index(hi, a), False)),
                )
            )
            factors.append(
                FermionOp(
                    1 / np.sqrt(2.0),
                    ((mode_index(hi, a), True), (mode_index(lo, a), False)),
                )
            )
        new_amp: dict = {}
        for bits, c in amp.items():
            for op in factors:
                res = op.apply(bits)
                if res is None:
                    continue
                d, nb = res
                new_amp[nb] = new_amp.get(nb, 0.0) + c * d
        amp = {b: c for b, c in new_amp.items() if c != 0.0}
        if not amp:
            raise ValueError(
                f"string construction annihilated the state at s={s}; "
                "site/vacuum convention mismatch"
            )
    vec = np.zeros(space.dim)
    for bits, c in amp.items():
        vec[space.index(bits)] = c
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ValueError("string state vanished after projection")
    return vec / norm


# Half-integer spins j with j(j+1) below any reachable cumulative Casimir.
def _spin_grid(space: SU2Space) -> np.ndarray:
    return np.arange(0, 2 * space.sites + 1) / 2.0


def link_representation_basis(space: SU2Space, tol: float = 1e-8):
    """Simultaneous eigenbasis of all link Casimirs, with spin labels.

    The link Casimirs mutually commute; a generically weighted sum is
    diagonalized once and each eigenvector is labeled by the spins j_l of
    every link. Returns (rotation, labels) where ``rotation`` has the new
    basis as columns and ``labels[k, l]`` is j_l of column k. Raises
    NumericalError if a column fails to be a simultaneous eigenvector.
    """
    links = space.sites - 1
    casimirs = [link_casimir(space, l).toarray() for l in range(links)]
    weights = 1.0 / np.sqrt(np.arange(2, links + 2) + np.pi / 10.0)
    combined = sum(w * c for w, c in zip(weights, casimirs))
    _, rotation = np.linalg.eigh(combined)
    grid = _spin_grid(space)
    casgrid = grid * (grid + 1.0)
    labels = np.zeros((space.dim, links))
    for l, cas in enumerate(casimirs):
        cv = cas @ rotation
        vals = np.einsum("ij,ij->j", rotation, cv)
        nearest = np.argmin(np.abs(vals[:, None] - casgrid[None, :]), axis=1)
        resid = np.linalg.norm(cv - rotation * casgrid[nearest], axis=0)
        bad = resid > tol
        if bad.any():
            k = int(np.argmax(resid))
            raise NumericalError(
                f"column {k} is not an eigenvector of link {l} Casimir "
                f"(residual {resid[k]:.3e}); degenerate weighting, adjust weights"
            )
        labels[:, l] = grid[nearest]
    return rotation, labels
