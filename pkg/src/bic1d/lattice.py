"""Two-band translation-invariant lattice Hamiltonians.

A model is ``H = sum_i (S^i (x) A_i^T + S*^i (x) A_i) + 1 (x) V`` on
``l^2(Z) (x) C^2`` with real hopping matrices ``A_1..A_r`` and a real
symmetric on-site block ``V``. Its Bloch symbol is

    h(k) = sum_i (A_i^T e^{i i k} + A_i e^{-i i k}) + V.

The inversion operator is ``(P psi)_n = Q psi_{-n}`` with a real spin matrix
``Q = n1 sigma_1 + n3 sigma_3``; the associated sublattice grading ``gamma``
is the real spin matrix perpendicular to ``Q``. Most invariants are evaluated
after rotating to the canonical basis ``Q = sigma_1, gamma = sigma_3`` where
the first component is the "open" sublattice and the second the "filled" one.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, GapClosedError, ModelError, SymmetryError

__all__ = [
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "IDENTITY",
    "HoppingModel",
    "LatticeBands",
    "SpectralGapInfo",
    "SnnDecomposition",
    "bloch_symbol",
    "band_spectrum",
    "check_p_symmetry",
    "associated_sublattice",
    "canonical_basis",
    "to_canonical",
    "is_chiral",
    "chiral_symbol",
    "min_chiral_symbol",
    "winding_number",
    "zak_phase",
    "snn_decompose",
    "reassemble",
    "half_cell_shift",
]

SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]])
IDENTITY = np.eye(2)

SYMMETRY_TOL = 1e-12
PARITY_TOL = 1e-9


def _as_real_2x2(a, name):
    arr = np.asarray(a)
    if arr.shape != (2, 2):
        raise ModelError(f"{name} must be a 2x2 matrix, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        if np.abs(arr.imag).max() > 0:
            raise SymmetryError(f"{name} has complex entries; T-symmetry needs real matrices")
        arr = arr.real
    arr = np.array(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} has non-finite entries")
    return arr


def _spin_axis(q, name="Q"):
    """Return (n1, n3) for a real spin matrix ``n1 sigma_1 + n3 sigma_3``."""
    q = _as_real_2x2(q, name)
    if abs(q[0, 1] - q[1, 0]) > SYMMETRY_TOL or abs(q[0, 0] + q[1, 1]) > SYMMETRY_TOL:
        raise ModelError(f"{name} must be symmetric and traceless, got {q.tolist()}")
    n1, n3 = q[0, 1], q[0, 0]
    if abs(n1 * n1 + n3 * n3 - 1.0) > 1e-10:
        raise ModelError(f"{name} must square to the identity (n1^2 + n3^2 = {n1 * n1 + n3 * n3})")
    return n1, n3


def associated_sublattice(q):
    """Sublattice grading perpendicular to the reflection matrix ``q``.

    For ``q = n1 sigma_1 + n3 sigma_3`` this is ``gamma = -n3 sigma_1 + n1 sigma_3``
    with the overall sign fixed so that ``gamma[0, 0] >= 0`` (and
    ``gamma[0, 1] > 0`` when the diagonal vanishes).
    """
    n1, n3 = _spin_axis(q)
    gamma = -n3 * SIGMA1 + n1 * SIGMA3
    if gamma[0, 0] < -SYMMETRY_TOL or (abs(gamma[0, 0]) <= SYMMETRY_TOL and gamma[0, 1] < 0):
        gamma = -gamma
    return gamma + 0.0


@dataclass(frozen=True, eq=False)
class HoppingModel:
    """Finite-range, T-symmetric two-band lattice model.

    Parameters
    ----------
    hoppings : sequence of (2, 2) arrays
        Left-hopping matrices ``A_1..A_r``; ``A_i`` carries range ``i``.
    onsite : (2, 2) array
        Symmetric on-site block ``V``.
    q : (2, 2) array, optional
        Reflection spin matrix, default ``sigma_1``.
    gamma : (2, 2) array, optional
        Sublattice grading; derived from ``q`` when omitted.
    """

    hoppings: tuple
    onsite: np.ndarray
    q: np.ndarray = field(default_factory=lambda: SIGMA1.copy())
    gamma: np.ndarray = None

    def __post_init__(self):
        hops = tuple(_as_real_2x2(a, f"A_{i + 1}") for i, a in enumerate(self.hoppings))
        if not hops:
            raise ModelError("a model needs range r >= 1 (pass a zero matrix for A_1)")
        onsite = _as_real_2x2(self.onsite, "V")
        if abs(onsite[0, 1] - onsite[1, 0]) > SYMMETRY_TOL * max(1.0, np.abs(onsite).max()):
            raise ModelError(f"V must be symmetric, got {onsite.tolist()}")
        q = _as_real_2x2(self.q, "Q")
        _spin_axis(q)
        gamma = associated_sublattice(q) if self.gamma is None else _as_real_2x2(self.gamma, "gamma")
        if np.abs(gamma @ gamma - IDENTITY).max() > 1e-10 or np.abs(gamma - gamma.T).max() > SYMMETRY_TOL:
            raise ModelError("gamma must be a real symmetric involution")
        if np.abs(q @ gamma + gamma @ q).max() > 1e-10:
            raise ModelError("gamma must anticommute with Q")
        for arr in (*hops, onsite, q, gamma):
            arr.setflags(write=False)
        object.__setattr__(self, "hoppings", hops)
        object.__setattr__(self, "onsite", onsite)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "gamma", gamma)

    @property
    def range(self):
        return len(self.hoppings)

    def block(self, d):
        """Real-space block ``H_{n, n+d}``: ``A_d`` for d > 0, ``A_|d|^T`` for d < 0."""
        if d == 0:
            return self.onsite
        if abs(d) > self.range:
            return np.zeros((2, 2))
        a = self.hoppings[abs(d) - 1]
        return a if d > 0 else a.T

    def scaled(self, factor):
        return HoppingModel([factor * a for a in self.hoppings], factor * self.onsite, self.q, self.gamma)

    def shifted(self, energy):
        """Same model with ``energy * I`` added on site."""
        return HoppingModel(self.hoppings, self.onsite + energy * IDENTITY, self.q, self.gamma)

    def __repr__(self):
        hops = ", ".join(str(a.tolist()) for a in self.hoppings)
        return f"HoppingModel(hoppings=[{hops}], onsite={self.onsite.tolist()}, q={self.q.tolist()})"


@dataclass(frozen=True)
class LatticeBands:
    k: np.ndarray
    energies: np.ndarray  # shape (n_k, 2), ascending per row


@dataclass(frozen=True)
class SpectralGapInfo:
    gapped: bool
    lower: float
    upper: float
    error_bar: float = 0.0

    @property
    def center(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self):
        return 0.5 * (self.upper - self.lower)

    def contains(self, energy):
        return self.gapped and self.lower < energy < self.upper


@dataclass(frozen=True)
class SnnDecomposition:
    """Strictly nearest-neighbour split of a P,T-symmetric model.

    All matrices live in the canonical basis; ``basis`` maps it back
    (``A_original = basis @ A_canonical @ basis.T``).
    """

    v0: float
    s: float
    t: float
    far_norm: float
    far_hoppings: tuple
    far_onsite: np.ndarray
    basis: np.ndarray

    @property
    def delta(self):
        """Half-width of the gap of the SNN part around ``v0``."""
        return abs(abs(self.s) - abs(self.t))

    def snn_model(self):
        a = np.array([[0.0, 0.0], [self.t, 0.0]])
        v = np.array([[self.v0, self.s], [self.s, self.v0]])
        return HoppingModel([a], v, SIGMA1)

    def far_model(self):
        return HoppingModel(self.far_hoppings, self.far_onsite, SIGMA1)


def bloch_symbol(model, k):
    """Bloch Hamiltonian ``h(k)``; ``k`` may be a scalar or an array."""
    k = np.asarray(k, dtype=float)
    h = np.zeros(k.shape + (2, 2), dtype=complex)
    h += model.onsite
    for i, a in enumerate(model.hoppings, start=1):
        phase = np.exp(1j * i * k)[..., None, None]
        h += a.T * phase + a * phase.conj()
    return h


def _lipschitz_bound(model):
    return sum(2.0 * i * np.linalg.norm(a, 2) for i, a in enumerate(model.hoppings, start=1))


def band_spectrum(model, n_k=512):
    """Sample both bands on a uniform grid of ``[-pi, pi]`` and locate the gap.

    For exactly chiral models the gap edges come from the exact minimum of
    ``|h_{+-}|``; otherwise the grid extrema are reported together with a
    grid-spacing error bar.
    """
    if n_k < 16:
        raise ValueError("n_k must be at least 16")
    k = np.linspace(-np.pi, np.pi, int(n_k))
    energies = np.linalg.eigvalsh(bloch_symbol(model, k))
    bands = LatticeBands(k, energies)

    scale = max(1.0, np.abs(energies).max())
    if is_chiral(model):
        m = min_chiral_symbol(model)
        gapped = m > 1e-12 * scale
        gap = SpectralGapInfo(bool(gapped), -m, m, 0.0)
    else:
        lower, upper = energies[:, 0].max(), energies[:, 1].min()
        dk = k[1] - k[0]
        err = 0.5 * _lipschitz_bound(model) * dk
        gap = SpectralGapInfo(bool(upper - lower > 1e-12 * scale), float(lower), float(upper), float(err))
    return bands, gap


def check_p_symmetry(model, tol=SYMMETRY_TOL):
    """True iff ``Q A_i^T = A_i Q`` for every hopping and ``Q V = V Q``."""
    q = model.q
    scale = max(1.0, max(np.abs(a).max() for a in (*model.hoppings, model.onsite)))
    for a in model.hoppings:
        if np.abs(q @ a.T - a @ q).max() > tol * scale:
            return False
    return bool(np.abs(q @ model.onsite - model.onsite @ q).max() <= tol * scale)


def canonical_basis(model):
    """Orthogonal ``U`` with ``U^T Q U = sigma_1`` and ``U^T gamma U = sigma_3``.

    Built from the +1 eigenvector ``g`` of ``gamma``: ``U = [g, Q g]``. This is
    the real form of the SU(2) spin rotation taking the axis of ``Q`` to
    ``sigma_1`` (they differ by a global phase at most).
    """
    gamma = model.gamma
    angle = np.arctan2(gamma[0, 1], gamma[0, 0])
    g = np.array([np.cos(angle / 2), np.sin(angle / 2)])
    u = np.column_stack([g, model.q @ g])
    return u


def to_canonical(model):
    """The same model expressed in the basis where ``Q = sigma_1, gamma = sigma_3``."""
    u = canonical_basis(model)
    if np.array_equal(u, IDENTITY):
        return model
    hops = [u.T @ a @ u for a in model.hoppings]
    v = u.T @ model.onsite @ u
    v = 0.5 * (v + v.T)
    return HoppingModel(hops, v, SIGMA1, SIGMA3)


def is_chiral(model, tol=SYMMETRY_TOL):
    """True iff every block anticommutes with ``gamma`` (off-diagonal in the canonical basis)."""
    g = model.gamma
    scale = max(1.0, max(np.abs(a).max() for a in (*model.hoppings, model.onsite)))
    return all(np.abs(g @ a + a @ g).max() <= tol * scale for a in (*model.hoppings, model.onsite))


def _symbol_coefficients(model):
    """Laurent coefficients ``c_d`` of ``h_{+-}(k) = sum_d c_d e^{i d k}``, d = -r..r."""
    c = to_canonical(model)
    r = c.range
    coeffs = np.zeros(2 * r + 1)
    coeffs[r] = c.onsite[1, 0]
    for i, a in enumerate(c.hoppings, start=1):
        coeffs[r + i] = a[0, 1]
        coeffs[r - i] = a[1, 0]
    return coeffs


def chiral_symbol(model, k):
    """Lower-left entry ``h_{+-}(k)`` of the canonical-basis symbol."""
    if not is_chiral(model):
        raise SymmetryError("model is not chiral symmetric with respect to its sublattice grading")
    coeffs = _symbol_coefficients(model)
    r = (coeffs.size - 1) // 2
    k = np.asarray(k, dtype=float)
    d = np.arange(-r, r + 1)
    return np.exp(1j * np.multiply.outer(k, d)) @ coeffs


def min_chiral_symbol(model):
    """Exact minimum over the Brillouin zone of ``|h_{+-}(k)|``.

    ``|h_{+-}|^2`` is a real trigonometric polynomial of degree ``2r``; its
    critical points are the unimodular roots of a degree ``4r`` polynomial.
    """
    coeffs = _symbol_coefficients(model)
    r = (coeffs.size - 1) // 2
    # p_m = sum_d c_d c_{d-m}, m = -2r..2r
    p = np.convolve(coeffs, coeffs[::-1])
    m = np.arange(-2 * r, 2 * r + 1)
    deriv = m * p  # coefficients of z^m in dP/dk / i
    candidates = [0.0, np.pi]
    if np.any(deriv != 0):
        roots = np.roots(deriv[::-1])
        for z in roots:
            if abs(abs(z) - 1.0) < 1e-6:
                candidates.append(float(np.angle(z)))
    grid = np.linspace(-np.pi, np.pi, 64 * r + 1)
    ks = np.concatenate([grid, candidates])
    values = np.abs(np.exp(1j * np.multiply.outer(ks, np.arange(-r, r + 1))) @ coeffs)
    return float(values.min())


def winding_number(model, tol=1e-10, max_samples=2 ** 20):
    """Winding number of ``k -> h_{+-}(k)`` around the origin.

    The phase increments are summed on a grid that is doubled until every
    increment is below ``pi / 2``.
    """
    if not is_chiral(model):
        raise SymmetryError("winding number needs a chiral symmetric model")
    coeffs = _symbol_coefficients(model)
    scale = max(1.0, np.abs(coeffs).sum())
    if min_chiral_symbol(model) < tol * scale:
        raise GapClosedError("symbol h_{+-} vanishes on the Brillouin zone; gap is closed")
    n = 64 * model.range
    while True:
        k = np.linspace(-np.pi, np.pi, n + 1)
        z = chiral_symbol(model, k)
        if np.abs(z).min() < tol * scale:
            raise GapClosedError("symbol h_{+-} vanishes on the Brillouin zone; gap is closed")
        steps = np.angle(z[1:] / z[:-1])
        if np.abs(steps).max() < np.pi / 2:
            return int(round(steps.sum() / (2 * np.pi)))
        if n >= max_samples:
            raise GapClosedError("phase increments of h_{+-} do not resolve; symbol nearly vanishes")
        n *= 2


def _lower_parity(model, k):
    h = bloch_symbol(model, k).real
    w, v = np.linalg.eigh(h)
    if w[1] - w[0] <= 1e-12 * max(1.0, np.abs(w).max()):
        raise GapClosedError(f"bands touch at k = {k:g}; Zak phase undefined")
    vec = v[:, 0]
    qv = model.q @ vec
    if np.linalg.norm(qv - vec) < PARITY_TOL:
        return 1
    if np.linalg.norm(qv + vec) < PARITY_TOL:
        return -1
    raise ClassificationError(f"lower Bloch vector at k = {k:g} is not a Q-parity eigenvector")


def zak_phase(model):
    """Quantized Zak phase of the lower band, 0.0 or pi.

    Computed from the Q-parities of the lower Bloch vectors at ``k = 0`` and
    ``k = pi``: equal parities give 0, opposite parities give pi.
    """
    if not check_p_symmetry(model):
        raise SymmetryError("Zak phase quantization needs a P-symmetric model")
    p0 = _lower_parity(model, 0.0)
    ppi = _lower_parity(model, np.pi)
    return 0.0 if p0 == ppi else float(np.pi)


def snn_decompose(model, n_k=None):
    """Split a P,T-symmetric model into its strictly nearest-neighbour part and the rest."""
    if not check_p_symmetry(model):
        raise SymmetryError("SNN decomposition needs a P-symmetric model")
    u = canonical_basis(model)
    c = to_canonical(model)
    v = c.onsite
    v0 = 0.5 * (v[0, 0] + v[1, 1])
    s = v[0, 1]
    t = c.hoppings[0][1, 0]
    far_hops = [a.copy() for a in c.hoppings]
    far_hops[0][1, 0] = 0.0
    far_onsite = v.copy()
    far_onsite[0, 1] = far_onsite[1, 0] = 0.0
    far_onsite[0, 0] -= v0
    far_onsite[1, 1] -= v0
    far = HoppingModel(far_hops, far_onsite, SIGMA1, SIGMA3)
    if n_k is None:
        n_k = 2048 * model.range
    k = np.linspace(-np.pi, np.pi, int(n_k) + 1)
    far_norm = float(np.abs(np.linalg.eigvalsh(bloch_symbol(far, k))).max())
    return SnnDecomposition(float(v0), float(s), float(t), far_norm, far.hoppings, far.onsite, u)


def reassemble(decomp):
    """Canonical-basis model rebuilt as SNN part plus remainder."""
    snn = decomp.snn_model()
    hops = [a.copy() for a in decomp.far_hoppings]
    hops[0] = hops[0] + snn.hoppings[0]
    return HoppingModel(hops, decomp.far_onsite + snn.onsite, SIGMA1, SIGMA3)


def half_cell_shift(model):
    """Relabel cells so that open-sublattice positions move by one cell.

    The new cell ``n`` holds the filled site of old cell ``n`` and the open
    site of old cell ``n + 1`` (conjugation by ``diag(shift, id)``). The result
    is returned in the canonical basis; its range grows by at most one.
    """
    c = to_canonical(model)
    r = c.range
    new_blocks = {}
    for d in range(-(r + 2), r + 3):
        b = np.zeros((2, 2))
        b[0, 0] = c.block(d)[0, 0]
        b[1, 1] = c.block(d)[1, 1]
        b[0, 1] = c.block(d - 1)[0, 1]
        b[1, 0] = c.block(d + 1)[1, 0]
        new_blocks[d] = b
    for d in range(1, r + 3):
        if not np.array_equal(new_blocks[-d], new_blocks[d].T):
            raise ModelError("half-cell shift produced an inconsistent block structure")
    if np.any(new_blocks[r + 2]):
        raise ModelError("half-cell shift exceeded range r + 1")
    hops = [new_blocks[d] for d in range(1, r + 2)]
    while len(hops) > 1 and not np.any(hops[-1]):
        hops.pop()
    return HoppingModel(hops, new_blocks[0], SIGMA1, SIGMA3)
