"""Reference models and seeded random generators used by tests and demos."""

import numpy as np

from .lattice import SIGMA1, SIGMA3, HoppingModel, canonical_basis, snn_decompose, bloch_symbol
from .lattice_interface import InterfaceSpec, interface_term_norm

__all__ = [
    "TWO_LAYER_PIECES",
    "SCHRODINGER_PIECES",
    "ssh_model",
    "simplest_interface",
    "long_range_chiral_counterexample",
    "two_layer_medium",
    "schrodinger_medium",
    "random_chiral_model",
    "random_pt_model",
    "random_dislocation",
    "random_medium",
]

TWO_LAYER_PIECES = ((0.25, 4.0, 1.0), (0.5, 1.0, 1.0), (0.25, 4.0, 1.0))
SCHRODINGER_PIECES = ((0.25, 0.0), (0.5, 10.0), (0.25, 0.0))


def ssh_model(s, t):
    """SSH bulk: intracell hopping ``s`` (on site), intercell hopping ``t``."""
    return HoppingModel([np.array([[0.0, 0.0], [t, 0.0]])], s * SIGMA1)


def simplest_interface(w=0.0):
    """Decoupled dimers on both sides of a lone interface site with potential ``w``."""
    bulk = HoppingModel([np.zeros((2, 2))], SIGMA1)
    return InterfaceSpec(bulk, bulk, [0.0, 0.0], [0.0, 0.0], w)


def long_range_chiral_counterexample():
    """Chiral range-2 model whose half-space has a pair of in-gap levels near +-1.283."""
    a1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    a2 = np.array([[0.0, 0.4], [0.0, 0.0]])
    return HoppingModel([a1, a2], SIGMA1)


def two_layer_medium():
    from .continuum import PeriodicMedium

    return PeriodicMedium("photonic", TWO_LAYER_PIECES)


def schrodinger_medium():
    from .continuum import PeriodicMedium

    return PeriodicMedium("schrodinger", SCHRODINGER_PIECES)


def _symbol_roots_ok(model, margin):
    # coefficients of z^r h_{+-}(z); roots near the unit circle mean a tiny gap
    r = model.range
    coeffs = np.zeros(2 * r + 1)
    coeffs[r] = model.onsite[1, 0]
    for i, a in enumerate(model.hoppings, start=1):
        coeffs[r + i] = a[0, 1]
        coeffs[r - i] = a[1, 0]
    coeffs = np.trim_zeros(coeffs[::-1], "f")
    roots = np.abs(np.roots(coeffs))
    return not np.any((roots > margin) & (roots < 1.0 / margin))


def random_chiral_model(rng, max_range=3, margin=0.85):
    """Random real chiral model (grading sigma_3) with a comfortable gap at 0."""
    while True:
        r = int(rng.integers(1, max_range + 1))
        hops = []
        for _ in range(r):
            hops.append(np.array([[0.0, rng.normal()], [rng.normal(), 0.0]]))
        model = HoppingModel(hops, rng.normal() * SIGMA1)
        if _symbol_roots_ok(model, margin):
            return model


def _random_axis(rng):
    angle = rng.uniform(0, 2 * np.pi)
    return np.cos(angle) * SIGMA1 + np.sin(angle) * SIGMA3


def _rotate_in(blocks, q):
    # canonical coordinates -> a basis where the reflection matrix is q
    u = canonical_basis(HoppingModel([np.zeros((2, 2))], np.zeros((2, 2)), q))
    return [u @ b @ u.T for b in blocks], u


def random_pt_model(rng, topological, max_range=3, far_fraction=0.9, s_range=(0.1, 0.7), rotate=True):
    """Random P,T-symmetric model with ``far_norm < far_fraction * Delta / 2``.

    ``topological`` selects ``|t| > |s|`` (Zak phase pi) or ``|s| > |t|``.
    """
    r = int(rng.integers(1, max_range + 1))
    small = rng.uniform(*s_range) * rng.choice([-1.0, 1.0])
    big = rng.choice([-1.0, 1.0]) * rng.uniform(0.8, 1.2)
    s, t = (small, big) if topological else (big, small)
    v0 = rng.uniform(-1, 1)
    delta = abs(abs(s) - abs(t))
    far = []
    for i in range(r):
        a, b, c = rng.normal(size=3)
        far.append(np.array([[a, b], [0.0 if i == 0 else c, a]]))
    far_v = np.zeros((2, 2))
    probe = HoppingModel(far, far_v, SIGMA1, SIGMA3)
    k = np.linspace(-np.pi, np.pi, 2048 * r + 1)
    norm = np.abs(np.linalg.eigvalsh(bloch_symbol(probe, k))).max()
    scale = rng.uniform(0.2, far_fraction) * 0.5 * delta / max(norm, 1e-300)
    hops = [scale * a for a in far]
    hops[0][1, 0] = t
    onsite = v0 * np.eye(2) + s * SIGMA1
    if not rotate:
        return HoppingModel(hops, onsite, SIGMA1, SIGMA3)
    q = _random_axis(rng)
    blocks, _ = _rotate_in([*hops, onsite], q)
    return HoppingModel(blocks[:-1], 0.5 * (blocks[-1] + blocks[-1].T), q)


def random_dislocation(rng, topological, max_range=3, term_fraction=0.9):
    """Random dislocation model whose interface term has norm below ``term_fraction * Delta / 4``."""
    while True:
        s_range = (0.02, 0.08) if topological else (0.1, 0.7)
        model = random_pt_model(rng, topological, max_range, far_fraction=0.3, s_range=s_range)
        dec = snn_decompose(model)
        limit = term_fraction * dec.delta / 4
        u = dec.basis
        if topological:
            base_l, base_r, base_w = np.array([0.0, dec.t]), np.array([dec.t, 0.0]), dec.v0
        else:
            base_l, base_r, base_w = np.zeros(2), np.zeros(2), dec.v0
        pl, pr, pw = rng.normal(size=2), rng.normal(size=2), rng.normal()
        for amp in limit * np.array([0.5, 0.25, 0.1, 0.03]):
            b_left = (base_l + amp * pl) @ u.T
            b_right = (base_r + amp * pr) @ u.T
            spec = InterfaceSpec(model, model, b_left, b_right, base_w + amp * pw)
            if interface_term_norm(spec) < limit:
                return spec


def random_medium(rng, kind="photonic", n_layers=None):
    """Random inversion-symmetric piecewise-constant medium (palindromic layer list)."""
    from .continuum import PeriodicMedium

    n_half = int(rng.integers(2, 5)) if n_layers is None else int(n_layers)
    widths = rng.uniform(0.5, 1.5, n_half)
    widths = 0.5 * widths / widths.sum()
    if kind == "photonic":
        coeffs = [(rng.uniform(1, 6), rng.uniform(0.5, 2)) for _ in range(n_half)]
        half = [(w, e, m) for w, (e, m) in zip(widths, coeffs)]
    else:
        half = [(w, rng.uniform(-5, 15)) for w in widths]
    pieces = half + half[::-1]
    return PeriodicMedium(kind, pieces)
