import numpy as np
import pytest

from gaugefrag.u1 import (
    build_momentum_zero,
    build_u1_hamiltonian,
    build_u1_space,
    counter_D,
    counter_P,
    counter_P_symmetric,
    electric_energy_total,
    electric_energy_upper,
    project_operator,
    shift_permutation,
)


def diagonal_oracle(config, g):
    """Independent term-by-term evaluation of the electric diagonal."""
    total = 0.0
    length = len(config)
    for p in range(length):
        n, nn = config[p], config[(p + 1) % length]
        total += g * g * (n * n + 0.5 * (n - nn) ** 2)
    return total


def orbit_oracle(configs):
    """Independent translation-orbit enumeration over config tuples."""
    seen, orbits = set(), []
    for c in configs:
        if c in seen:
            continue
        orbit = {c}
        cur = c[-1:] + c[:-1]
        while cur != c:
            orbit.add(cur)
            cur = cur[-1:] + cur[:-1]
        seen |= orbit
        orbits.append(frozenset(orbit))
    return orbits


from oracles import hand_assembled_l2


def test_space_dimensions():
    assert build_u1_space(2, 1).dim == 9
    assert build_u1_space(4, 4).dim == 6561
    assert build_u1_space(3, 2).dim == 125


def test_space_preconditions():
    with pytest.raises(ValueError):
        build_u1_space(1, 1)
    with pytest.raises(ValueError):
        build_u1_space(2, 0)


def test_capacity_error_reports_bits():
    with pytest.raises(ValueError, match="bits"):
        build_u1_space(40, 4)


def test_index_roundtrip():
    space = build_u1_space(3, 2)
    for k in range(space.dim):
        assert space.index(space.config(k)) == k
    # lexicographic ordering: first and last states
    assert space.config(0) == (-2, -2, -2)
    assert space.config(space.dim - 1) == (2, 2, 2)


def test_index_rejects_out_of_range():
    space = build_u1_space(2, 1)
    with pytest.raises(ValueError):
        space.index((2, 0))
    with pytest.raises(ValueError):
        space.index((0, 0, 0))


def test_hamiltonian_examples():
    space = build_u1_space(2, 1)
    ham = build_u1_hamiltonian(space, 1.0)
    assert ham.matrix[space.index((1, 0)), space.index((1, 0))] == 2.0
    assert ham.matrix[space.index((1, 0)), space.index((0, 0))] == -0.5

    space44 = build_u1_space(4, 4)
    ham44 = build_u1_hamiltonian(space44, 0.6)
    k = space44.index((3, -2, 3, -2))
    assert ham44.matrix[k, k] == pytest.approx(27.36, abs=1e-12)
    assert ham44.matrix[k, k] == pytest.approx(
        diagonal_oracle((3, -2, 3, -2), 0.6), abs=1e-12
    )


def test_diagonal_matches_oracle_everywhere():
    space = build_u1_space(3, 2)
    ham = build_u1_hamiltonian(space, 0.7)
    diag = ham.diagonal()
    for k in range(space.dim):
        assert diag[k] == pytest.approx(diagonal_oracle(space.config(k), 0.7), abs=1e-12)


def test_hamiltonian_rejects_bad_coupling():
    space = build_u1_space(2, 1)
    with pytest.raises(ValueError):
        build_u1_hamiltonian(space, 0.0)
    with pytest.raises(ValueError):
        build_u1_hamiltonian(space, -1.0)


def test_hand_assembled_l2_matrix_exact():
    space = build_u1_space(2, 1)
    ham = build_u1_hamiltonian(space, 1.0)
    assert np.array_equal(ham.toarray(), hand_assembled_l2())


def test_hermiticity_exact():
    for length, lam, g in ((2, 1, 1.0), (3, 2, 0.6), (4, 2, 1.3)):
        ham = build_u1_hamiltonian(build_u1_space(length, lam), g)
        assert ham.max_asymmetry() == 0.0


def test_translation_covariance_exact():
    space = build_u1_space(3, 2)
    ham = build_u1_hamiltonian(space, 0.9)
    perm = shift_permutation(space)
    shifted = ham.matrix[perm, :][:, perm]
    assert (shifted != ham.matrix).nnz == 0


def test_truncation_is_hard():
    # no matrix element may raise past |n| = truncation
    space = build_u1_space(2, 1)
    ham = build_u1_hamiltonian(space, 1.0)
    coo = ham.matrix.tocoo()
    for i, j in zip(coo.row, coo.col):
        if i != j:
            ci, cj = np.array(space.config(i)), np.array(space.config(j))
            assert np.abs(ci - cj).sum() == 1


def test_counter_examples():
    space = build_u1_space(4, 4)
    k = space.index((3, -2, 3, -2))
    assert counter_P(space, 3).diagonal()[k] == 2
    assert counter_D(space, 5).diagonal()[k] == 4
    uniform = space.index((2, 2, 2, 2))
    assert counter_D(space, 0).diagonal()[uniform] == 4
    assert counter_P_symmetric(space, 2).diagonal()[k] == 2  # the two -2 entries


def test_counter_ranges_rejected():
    space = build_u1_space(2, 2)
    with pytest.raises(ValueError):
        counter_P(space, 3)
    with pytest.raises(ValueError):
        counter_D(space, 5)
    with pytest.raises(ValueError):
        counter_D(space, -1)
    with pytest.raises(ValueError):
        counter_P_symmetric(space, -1)


def test_counter_completeness_exact():
    space = build_u1_space(3, 2)
    lam, length = space.truncation, space.length
    p_total = sum(
        (counter_P(space, s).diagonal() for s in range(-lam, lam + 1)),
        start=np.zeros(space.dim),
    )
    assert np.array_equal(p_total, np.full(space.dim, length))
    d_total = sum(
        (counter_D(space, s).diagonal() for s in range(0, 2 * lam + 1)),
        start=np.zeros(space.dim),
    )
    assert np.array_equal(d_total, np.full(space.dim, length))


def test_momentum_sector_dimensions_burnside():
    # L=2, lam=1: (9 + 3)/2 = 6 orbits; L=4, lam=4: (9^4 + 9 + 81 + 9)/4 = 1665
    space = build_u1_space(2, 1)
    sector = build_momentum_zero(space)
    assert sector.dim == 6
    oracle = orbit_oracle([space.config(k) for k in range(space.dim)])
    assert len(oracle) == 6

    space44 = build_u1_space(4, 4)
    assert build_momentum_zero(space44).dim == 1665
    assert (9**4 + 9 + 81 + 9) // 4 == 1665


def test_momentum_orbits_match_oracle():
    space = build_u1_space(4, 2)
    sector = build_momentum_zero(space)
    oracle = {
        frozenset(o)
        for o in orbit_oracle([space.config(k) for k in range(space.dim)])
    }
    built = {
        frozenset(space.config(k) for k in orbit) for orbit in sector.orbits
    }
    assert built == oracle


def test_orbit_of_period_two_config():
    space = build_u1_space(4, 4)
    sector = build_momentum_zero(space)
    k = space.index((3, -2, 3, -2))
    orbit = next(o for o in sector.orbits if k in o)
    assert {space.config(i) for i in orbit} == {(3, -2, 3, -2), (-2, 3, -2, 3)}


def test_embedding_is_isometry():
    space = build_u1_space(3, 1)
    sector = build_momentum_zero(space)
    gram = (sector.embedding.T @ sector.embedding).toarray()
    assert np.abs(gram - np.eye(sector.dim)).max() < 1e-14
    # embedded vectors invariant under the shift permutation
    perm = shift_permutation(space)
    vec = sector.embed(np.random.default_rng(1).standard_normal(sector.dim))
    assert np.abs(vec[perm] - vec).max() < 1e-12


def test_project_identity():
    space = build_u1_space(2, 1)
    sector = build_momentum_zero(space)
    import scipy.sparse as sp

    from gaugefrag.operator import SymmetricOperator

    ident = SymmetricOperator(sp.identity(space.dim, format="csr"))
    proj = project_operator(ident, sector)
    assert np.abs(proj.toarray() - np.eye(sector.dim)).max() < 1e-14


def test_projected_spectrum_is_subset():
    space = build_u1_space(2, 1)
    ham = build_u1_hamiltonian(space, 1.0)
    sector = build_momentum_zero(space)
    sub = np.linalg.eigvalsh(project_operator(ham, sector).toarray())
    full = np.linalg.eigvalsh(ham.toarray())
    for e in sub:
        assert np.min(np.abs(full - e)) < 1e-10


def test_project_rejects_non_invariant_operator():
    space = build_u1_space(2, 1)
    sector = build_momentum_zero(space)
    import scipy.sparse as sp

    from gaugefrag.operator import SymmetricOperator

    diag = np.zeros(space.dim)
    for k in range(space.dim):
        diag[k] = space.config(k)[0] ** 2  # single-plaquette term
    bad = SymmetricOperator(sp.diags(diag, format="csr"), name="E_1^2")
    with pytest.raises(ValueError, match="commute"):
        project_operator(bad, sector)


def test_electric_observables():
    space = build_u1_space(4, 4)
    k = space.index((3, -2, 3, -2))
    assert electric_energy_total(space).diagonal()[k] == 152  # 2*26 + 100
    assert electric_energy_upper(space).diagonal()[k] == 26
