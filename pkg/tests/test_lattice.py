import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bic1d.errors import GapClosedError, ModelError, SymmetryError
from bic1d.fixtures import random_chiral_model, random_pt_model, ssh_model
from bic1d.lattice import (
    IDENTITY,
    SIGMA1,
    SIGMA3,
    HoppingModel,
    associated_sublattice,
    band_spectrum,
    bloch_symbol,
    check_p_symmetry,
    half_cell_shift,
    is_chiral,
    reassemble,
    snn_decompose,
    to_canonical,
    winding_number,
    zak_phase,
)

from oracles import berry_zak_phase, winding_by_roots


def periodic_ring(model, n_cells):
    """Dense Hamiltonian of ``n_cells`` cells with periodic closure."""
    h = np.zeros((2 * n_cells, 2 * n_cells))
    for n in range(n_cells):
        for d in range(-model.range, model.range + 1):
            m = (n + d) % n_cells
            h[2 * n:2 * n + 2, 2 * m:2 * m + 2] += model.block(d)
    return h


# --- construction -------------------------------------------------------------


def test_model_validation():
    with pytest.raises(ModelError, match="symmetric"):
        HoppingModel([np.zeros((2, 2))], [[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ModelError):
        HoppingModel([np.zeros((2, 2))], np.zeros((2, 2)), q=IDENTITY)
    with pytest.raises(ModelError):
        HoppingModel([], np.zeros((2, 2)))
    m = ssh_model(1, 0.5)
    with pytest.raises(ValueError):
        m.hoppings[0][0, 0] = 1.0


def test_bloch_symbol_ssh():
    s, t = 0.7, 1.3
    k = np.linspace(-np.pi, np.pi, 9)
    h = bloch_symbol(ssh_model(s, t), k)
    np.testing.assert_allclose(h[:, 1, 0], s + t * np.exp(-1j * k), atol=1e-15)
    np.testing.assert_allclose(h[:, 0, 0], 0, atol=1e-15)
    np.testing.assert_allclose(h[:, 0, 1], np.conj(h[:, 1, 0]), atol=1e-15)


def test_bloch_symbol_constant():
    m = HoppingModel([np.zeros((2, 2))], SIGMA1)
    np.testing.assert_allclose(bloch_symbol(m, 1.234), SIGMA1)


def test_bloch_symbol_at_zero_is_matrix_sum():
    rng = np.random.default_rng(0)
    a1, a2 = rng.normal(size=(2, 2, 2))
    v = rng.normal(size=(2, 2))
    v = v + v.T
    m = HoppingModel([a1, a2], v, q=SIGMA3)
    h = bloch_symbol(m, 0.0)
    np.testing.assert_allclose(h, a1 + a1.T + a2 + a2.T + v, atol=1e-14)
    np.testing.assert_allclose(h, h.conj().T)


# --- spectra -----------------------------------------------------------------


def test_ssh_gap_and_ring_oracle():
    m = ssh_model(1, 0.5)
    _, gap = band_spectrum(m)
    assert gap.gapped
    np.testing.assert_allclose([gap.lower, gap.upper], [-0.5, 0.5], atol=1e-12)
    w = np.linalg.eigvalsh(periodic_ring(m, 400))
    np.testing.assert_allclose([w[w < 0].max(), w[w > 0].min()], [-0.5, 0.5], atol=1e-12)


def test_ssh_critical_not_gapped():
    _, gap = band_spectrum(ssh_model(1, 1))
    assert not gap.gapped


def test_decoupled_dimers_gap():
    bands, gap = band_spectrum(HoppingModel([np.zeros((2, 2))], SIGMA1))
    np.testing.assert_allclose(bands.energies[:, 0], -1)
    np.testing.assert_allclose(bands.energies[:, 1], 1)
    assert (gap.lower, gap.upper) == (-1.0, 1.0)


def test_non_chiral_gap_has_error_bar():
    rng = np.random.default_rng(2)
    m = random_pt_model(rng, topological=False)
    bands, gap = band_spectrum(m, n_k=256)
    assert gap.error_bar > 0
    assert bands.energies[:, 0].max() <= gap.lower + 1e-15
    assert bands.energies[:, 1].min() >= gap.upper - 1e-15


def test_band_spectrum_rejects_coarse_grid():
    with pytest.raises(ValueError):
        band_spectrum(ssh_model(1, 0.5), n_k=8)


# --- symmetry ----------------------------------------------------------------


def test_p_symmetry_examples():
    assert check_p_symmetry(ssh_model(1, 0.5))
    assert not check_p_symmetry(HoppingModel([np.diag([1.0, 0.0])], np.zeros((2, 2))))
    for q in (SIGMA1, SIGMA3, (SIGMA1 + SIGMA3) / np.sqrt(2)):
        assert check_p_symmetry(HoppingModel([np.zeros((2, 2))], 0.3 * IDENTITY, q))


def test_associated_sublattice():
    np.testing.assert_allclose(associated_sublattice(SIGMA1), SIGMA3)
    np.testing.assert_allclose(associated_sublattice(SIGMA3), SIGMA1)
    q = (SIGMA1 + SIGMA3) / np.sqrt(2)
    np.testing.assert_allclose(associated_sublattice(q), (SIGMA3 - SIGMA1) / np.sqrt(2), atol=1e-15)
    with pytest.raises(ModelError):
        associated_sublattice(np.diag([1.0, 1.0]))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * np.pi))
def test_associated_sublattice_property(angle):
    q = np.cos(angle) * SIGMA1 + np.sin(angle) * SIGMA3
    g = associated_sublattice(q)
    np.testing.assert_allclose(g @ g, IDENTITY, atol=1e-14)
    np.testing.assert_allclose(g @ q + q @ g, 0, atol=1e-14)
    assert g[0, 0] >= -1e-15


# --- winding -------------------------------------------------------------------


def test_ssh_winding():
    assert winding_number(ssh_model(1, 0.5)) == 0
    assert winding_number(ssh_model(0.5, 1)) == -1


def test_pure_left_hop_winds_plus_one():
    m = HoppingModel([np.array([[0.0, 1.0], [0.0, 0.0]])], np.zeros((2, 2)))
    assert winding_number(m) == 1


def test_winding_errors():
    with pytest.raises(GapClosedError):
        winding_number(ssh_model(1, 1))
    with pytest.raises(SymmetryError):
        winding_number(HoppingModel([np.zeros((2, 2))], SIGMA3 + SIGMA1))


def test_winding_matches_root_count_oracle():
    rng = np.random.default_rng(11)
    for _ in range(30):
        m = random_chiral_model(rng)
        assert winding_number(m) == winding_by_roots(m)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 100))
def test_winding_scale_invariant(seed, scale):
    m = random_chiral_model(np.random.default_rng(seed))
    assert winding_number(m.scaled(scale)) == winding_number(m)


# --- Zak phase -------------------------------------------------------------------


def test_zak_examples():
    assert zak_phase(ssh_model(1, 0.5)) == 0.0
    assert zak_phase(ssh_model(0.5, 1)) == np.pi
    assert zak_phase(HoppingModel([np.zeros((2, 2))], SIGMA1)) == 0.0


def test_zak_requires_p_symmetry():
    with pytest.raises(SymmetryError):
        zak_phase(HoppingModel([np.diag([1.0, 0.0])], SIGMA1))


def test_zak_matches_berry_phase_oracle():
    rng = np.random.default_rng(5)
    for i in range(16):
        m = random_pt_model(rng, topological=bool(i % 2))
        berry = berry_zak_phase(m)
        assert min(abs(berry - zak_phase(m)), 2 * np.pi - abs(berry - zak_phase(m))) < 1e-6


def test_zak_is_pi_times_winding_parity():
    rng = np.random.default_rng(8)
    for _ in range(20):
        m = random_chiral_model(rng)
        assert zak_phase(m) == np.pi * (winding_number(m) % 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_symbol_symmetries(seed):
    rng = np.random.default_rng(seed)
    m = random_pt_model(rng, topological=bool(seed % 2))
    k = rng.uniform(-np.pi, np.pi, 7)
    h, hm = bloch_symbol(m, k), bloch_symbol(m, -k)
    np.testing.assert_allclose(hm, h.conj(), atol=1e-12)
    np.testing.assert_allclose(m.q @ hm @ m.q, h, atol=1e-12)


# --- SNN decomposition and half-cell shift -------------------------------------------


def test_snn_ssh():
    d = snn_decompose(ssh_model(0.5, 1))
    assert (d.v0, d.s, d.t, d.far_norm) == (0.0, 0.5, 1.0, 0.0)


def test_snn_far_norm_range_two():
    m = HoppingModel([np.array([[0.0, 0.0], [0.5, 0.0]]), 0.1 * SIGMA1], SIGMA1)
    d = snn_decompose(m)
    np.testing.assert_allclose(d.far_norm, 0.2, rtol=1e-12)
    k = np.linspace(-np.pi, np.pi, 10001)
    np.testing.assert_allclose(np.abs(0.2 * np.cos(2 * k)).max(), 0.2)


def test_snn_scalar_onsite():
    d = snn_decompose(HoppingModel([np.zeros((2, 2))], 0.7 * IDENTITY))
    assert (d.v0, d.s, d.t, d.far_norm) == (0.7, 0.0, 0.0, 0.0)


def test_snn_roundtrip():
    rng = np.random.default_rng(4)
    for i in range(10):
        m = random_pt_model(rng, topological=bool(i % 2))
        c = to_canonical(m)
        back = reassemble(snn_decompose(m))
        for a, b in zip(c.hoppings, back.hoppings):
            np.testing.assert_allclose(a, b, atol=1e-15)
        np.testing.assert_allclose(c.onsite, back.onsite, atol=1e-15)


def test_half_cell_shift_examples():
    shifted = half_cell_shift(ssh_model(1, 0.5))
    assert zak_phase(shifted) == np.pi
    dimers = half_cell_shift(HoppingModel([np.zeros((2, 2))], SIGMA1))
    np.testing.assert_array_equal(dimers.hoppings[0], [[0, 1], [0, 0]])
    np.testing.assert_array_equal(dimers.onsite, np.zeros((2, 2)))
    assert zak_phase(dimers) == np.pi


def test_half_cell_shift_twice_keeps_zak_and_spectrum():
    # two shifts conjugate by diag(shift^2, id): one sublattice moves two cells
    rng = np.random.default_rng(9)
    for i in range(6):
        m = random_pt_model(rng, topological=bool(i % 2))
        twice = half_cell_shift(half_cell_shift(m))
        assert zak_phase(twice) == zak_phase(m)
        assert twice.range <= m.range + 2
        k = np.linspace(-np.pi, np.pi, 33)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(bloch_symbol(twice, k)), np.linalg.eigvalsh(bloch_symbol(m, k)), atol=1e-12
        )


def test_half_cell_shift_preserves_spectrum():
    rng = np.random.default_rng(10)
    m = random_pt_model(rng, topological=False)
    k = np.linspace(-np.pi, np.pi, 33)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(bloch_symbol(half_cell_shift(m), k)),
        np.linalg.eigvalsh(bloch_symbol(m, k)),
        atol=1e-12,
    )


def test_chiral_models_are_p_symmetric():
    rng = np.random.default_rng(12)
    for _ in range(10):
        m = random_chiral_model(rng)
        assert is_chiral(m) and check_p_symmetry(m)
