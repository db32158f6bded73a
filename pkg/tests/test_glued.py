import numpy as np
import pytest

from bic1d.continuum import PeriodicMedium, band_structure, edge_parity, monodromy, transfer
from bic1d.errors import ModelError, NumericalError
from bic1d.fixtures import random_medium, schrodinger_medium, two_layer_medium
from bic1d.glued import (
    common_gap,
    dislocate,
    find_interface_mode,
    glue,
    matching_function,
    mode_profile,
    scan_interface_modes,
)

from oracles import fd_full_line_eigenvalues


@pytest.fixture(scope="module")
def two_layer_mode():
    m = two_layer_medium()
    system = glue(m, dislocate(m))
    return system, find_interface_mode(system)


# --- common gap and dislocation ------------------------------------------------------


def test_common_gap_self():
    m = two_layer_medium()
    assert common_gap(m, m) == band_structure(m, 1).gap(1)


def test_common_gap_dislocated():
    m = two_layer_medium()
    np.testing.assert_allclose(common_gap(m, dislocate(m)), common_gap(m, m), rtol=1e-12)


def test_common_gap_disjoint():
    m = two_layer_medium()
    slow = PeriodicMedium("photonic", [(p[0], 10 * p[1], p[2]) for p in m.pieces])
    assert common_gap(m, slow) is None
    with pytest.raises(ModelError, match="overlap"):
        glue(m, slow)


def test_glue_rejects_mixed_kinds():
    with pytest.raises(ModelError):
        glue(two_layer_medium(), schrodinger_medium())


def test_dislocate_rotates_pieces():
    d = dislocate(two_layer_medium())
    assert d.pieces == ((0.25, 1.0, 1.0), (0.5, 4.0, 1.0), (0.25, 1.0, 1.0))


def test_dislocate_twice_is_identity():
    rng = np.random.default_rng(6)
    for m in [two_layer_medium(), schrodinger_medium(), random_medium(rng), random_medium(rng, "schrodinger")]:
        assert dislocate(dislocate(m)).same_as(m)


def test_dislocate_homogeneous():
    m = PeriodicMedium("photonic", [(1.0, 2.0, 3.0)])
    assert dislocate(m).same_as(m)


def test_dislocate_keeps_bands_and_flips_pi_parity():
    m = two_layer_medium()
    d = dislocate(m)
    a, b = band_structure(m, 2), band_structure(d, 2)
    np.testing.assert_allclose(a.energies, b.energies, rtol=1e-10)
    assert a.gap_momentum(1) == np.pi
    edge_a, edge_b = a.edges[0][1], b.edges[0][1]
    assert edge_parity(m, edge_a).parity != edge_parity(d, edge_b).parity


# --- interface mode ---------------------------------------------------------------------


def test_dislocation_mode_unique(two_layer_mode):
    system, mode = two_layer_mode
    assert system.predicted
    lo, hi = system.gap
    assert lo < mode.energy < hi and mode.reliable
    assert mode.residual < 1e-9
    scanned = scan_interface_modes(system, with_profile=False)
    assert len(scanned) == 1
    np.testing.assert_allclose(scanned[0].energy, mode.energy, atol=1e-10)


def test_matching_function_increasing(two_layer_mode):
    system, _ = two_layer_mode
    lo, hi = system.gap
    pad = 1e-6 * (hi - lo)
    es = np.linspace(lo + pad, hi - pad, 400)
    vals = np.array([matching_function(system, e)[0] for e in es])
    assert np.all(np.diff(vals) > 0)
    assert np.sum(np.diff(np.sign(vals)) != 0) == 1


def test_dislocation_mode_fd_oracle(two_layer_mode):
    system, mode = two_layer_mode
    lo, hi = system.gap
    pad = 0.05 * (hi - lo)
    oracle = fd_full_line_eigenvalues(
        system.left.pieces, system.right.pieces, "photonic", (lo + pad, hi - pad), periods=20
    )
    assert oracle.size == 1
    assert abs(oracle[0] - mode.energy) <= 1e-6


def test_mirror_swap_same_energy(two_layer_mode):
    system, mode = two_layer_mode
    swapped = find_interface_mode(glue(system.right, system.left), with_profile=False)
    np.testing.assert_allclose(swapped.energy, mode.energy, atol=1e-11)


def test_no_mode_without_dislocation():
    m = two_layer_medium()
    system = glue(m, m)
    assert not system.predicted
    assert find_interface_mode(system) is None


# --- profile ------------------------------------------------------------------------------


def test_profile_normalized_and_decays(two_layer_mode):
    _, mode = two_layer_mode
    p = mode.profile
    np.testing.assert_allclose(np.trapezoid(p.weight * p.u ** 2, p.x), 1.0, rtol=1e-12)
    assert p.x[0] <= -20 and p.x[-1] >= 20
    peak = np.abs(p.u).max()
    assert max(abs(p.u[0]), abs(p.u[-1])) < 1e-6 * peak


def test_profile_continuous_at_interface(two_layer_mode):
    system, mode = two_layer_mode
    p = mode.profile
    at_minus_one = np.array([p.u[p.x == -1.0][0], p.v[p.x == -1.0][0]])
    at_zero = np.array([p.u[p.x == 0.0][0], p.v[p.x == 0.0][0]])
    # carry the left-hand state over the last period with the left medium only
    from_left = transfer(system.left, mode.energy, -1.0, 0.0) @ at_minus_one
    np.testing.assert_allclose(from_left, at_zero, atol=1e-10 * np.abs(at_zero).max())


def test_profile_envelope_matches_multiplier(two_layer_mode):
    system, mode = two_layer_mode
    p = mode.profile
    for medium, sign in ((system.right, 1), (system.left, -1)):
        lam = np.linalg.eigvals(monodromy(medium, mode.energy))
        rate = np.abs(lam).min()
        env = [np.abs(p.u[(sign * p.x >= n) & (sign * p.x < n + 1)]).max() for n in range(2, 12)]
        ratios = np.array(env[1:]) / np.array(env[:-1])
        np.testing.assert_allclose(ratios, rate, rtol=1e-2)


def test_profile_matches_direct_propagation(two_layer_mode):
    system, mode = two_layer_mode
    p = mode.profile
    start = np.array([p.u[p.x == 0.0][0], p.v[p.x == 0.0][0]])
    for n in (1, 3, 6):
        direct = transfer(system.right, mode.energy, 0.0, float(n)) @ start
        np.testing.assert_allclose(p.u[p.x == float(n)][0], direct[0], atol=1e-9 * np.abs(start).max())


def test_profile_reflection_of_swapped_system(two_layer_mode):
    system, mode = two_layer_mode
    swapped = find_interface_mode(glue(system.right, system.left))
    a, b = mode.profile, swapped.profile
    xs = np.linspace(-5, 5, 41)
    ua = np.interp(xs, a.x, np.abs(a.u))
    ub = np.interp(-xs, b.x, np.abs(b.u))
    np.testing.assert_allclose(ua, ub, atol=1e-9)


def test_profile_rejects_short_window(two_layer_mode):
    system, mode = two_layer_mode
    with pytest.raises(NumericalError, match="too small"):
        mode_profile(system, mode, half_width=3)


# --- Schrodinger variant ---------------------------------------------------------------------


def test_schrodinger_dislocation_mode():
    m = schrodinger_medium()
    system = glue(m, dislocate(m))
    assert system.predicted
    mode = find_interface_mode(system)
    assert len(scan_interface_modes(system, with_profile=False)) == 1
    lo, hi = system.gap
    pad = 0.05 * (hi - lo)
    oracle = fd_full_line_eigenvalues(m.pieces, system.right.pieces, "schrodinger", (lo + pad, hi - pad), periods=20)
    assert oracle.size == 1
    assert abs(oracle[0] - mode.energy) <= 1e-6
    assert mode.decay_left > 0 and mode.decay_right > 0


def test_random_dislocations_have_one_mode():
    rng = np.random.default_rng(60)
    done = 0
    while done < 3:
        m = random_medium(rng)
        bs = band_structure(m, 1)
        if not bs.gap_open[0] or bs.gap_momentum(1) != np.pi:
            continue
        system = glue(m, dislocate(m))
        assert system.predicted
        assert len(scan_interface_modes(system, with_profile=False)) == 1
        done += 1
