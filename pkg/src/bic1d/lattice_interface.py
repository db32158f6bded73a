"""Finite truncations of half-space, interface and dislocation Hamiltonians.

Half-space operators are cut at ``N`` cells with an open far end; interface
operators live on ``C^{2N} (+) C (+) C^{2N}`` with the extra site at cell 0.
Modes sitting on an artificial cut are rejected by their boundary weight.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import eigen
from .errors import GapClosedError, ModelError, SymmetryError
from .lattice import (
    SIGMA1,
    SIGMA3,
    HoppingModel,
    SpectralGapInfo,
    band_spectrum,
    canonical_basis,
    check_p_symmetry,
    is_chiral,
    snn_decompose,
    to_canonical,
    zak_phase,
)

__all__ = [
    "BOUNDARY_WEIGHT_MAX",
    "InterfaceSpec",
    "FiniteTruncation",
    "ModeReport",
    "ZeroModeCount",
    "build_half_space",
    "build_interface",
    "eigensolve",
    "grading_matrix",
    "chiral_kernels",
    "chiral_index",
    "mode_report",
    "in_gap_modes",
    "ssh_interface",
    "verify_ssh",
    "verify_nn_no_nonzero_ingap",
    "dislocation_spec",
    "interface_term_norm",
]

BOUNDARY_WEIGHT_MAX = 0.01
ZERO_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class InterfaceSpec:
    """Bulk models on each side plus the couplings into the extra site.

    ``b_left`` is the row ``B_L^*`` multiplying ``psi_{-1}`` in the equation
    for the interface site, ``b_right`` is the row ``B_R`` multiplying
    ``psi_1``; ``w`` is the on-site value of the interface site.
    """

    left: HoppingModel
    right: HoppingModel
    b_left: np.ndarray
    b_right: np.ndarray
    w: float = 0.0

    def __post_init__(self):
        for name in ("b_left", "b_right"):
            row = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if row.shape != (2,):
                raise ModelError(f"{name} must be a 1x2 row, got {row.size} entries")
            object.__setattr__(self, name, row)
        object.__setattr__(self, "w", float(self.w))
        for side in ("left", "right"):
            if not check_p_symmetry(getattr(self, side)):
                raise SymmetryError(f"{side} bulk model is not P-symmetric")

    @property
    def range(self):
        return max(self.left.range, self.right.range)


@dataclass(frozen=True, eq=False)
class FiniteTruncation:
    matrix: np.ndarray
    cells: np.ndarray  # cell label of each row
    orbital: np.ndarray  # component 0/1 inside the cell, -1 for the interface site
    kind: str  # "right", "left" or "interface"
    range: int
    edges: tuple  # cell labels of the artificial cuts

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def n_cells(self):
        return int(np.abs(self.cells).max())

    def boundary_mask(self):
        """Rows within ``range`` cells of an artificial cut."""
        mask = np.zeros(self.dim, dtype=bool)
        for edge in self.edges:
            mask |= np.abs(self.cells - edge) < self.range
        return mask


@dataclass(frozen=True, eq=False)
class ModeReport:
    energy: float
    center: float
    decay_length: float
    boundary_weight: float
    cells: np.ndarray
    amplitudes: np.ndarray

    @property
    def accepted(self):
        return self.decay_length > 0 and self.boundary_weight < BOUNDARY_WEIGHT_MAX


@dataclass(frozen=True)
class ZeroModeCount:
    count: int
    index: int
    eigen_count: int
    modes: tuple

    @property
    def odd(self):
        return self.count % 2 == 1


def _place_blocks(h, rows_of, model, cells):
    """Fill the bulk blocks of ``model`` between the listed cells."""
    lookup = {c: i for i, c in enumerate(cells)}
    for c in cells:
        for d in range(0, model.range + 1):
            other = c + d
            if other not in lookup:
                continue
            i, j = rows_of(lookup[c]), rows_of(lookup[other])
            h[i, j] = model.block(d)
            if d:
                h[j, i] = model.block(d).T


def build_half_space(model, side, n_cells):
    """Truncated half-space Hamiltonian on cells ``1..N`` (right) or ``-1..-N`` (left).

    Rows ``0, 1`` always belong to the cell adjacent to the physical edge.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    n_cells = int(n_cells)
    if n_cells < 10 * model.range:
        raise ValueError(f"need N >= 10 r = {10 * model.range} cells, got {n_cells}")
    sign = 1 if side == "right" else -1
    cells = [sign * (j + 1) for j in range(n_cells)]
    dim = 2 * n_cells
    h = np.zeros((dim, dim))
    # blocks are keyed by cell label, so the storage order does not matter
    _place_blocks(h, lambda j: slice(2 * j, 2 * j + 2), model, cells)
    row_cells = np.repeat(cells, 2)
    orbital = np.tile([0, 1], n_cells)
    return FiniteTruncation(h, row_cells, orbital, side, model.range, (sign * n_cells,))


def build_interface(spec, n_cells):
    """Interface Hamiltonian on cells ``-N..-1``, the extra site, and ``1..N``.

    Rows are in position order: left cells ascending, the interface site,
    then right cells ascending.
    """
    n_cells = int(n_cells)
    if n_cells < 10 * spec.range:
        raise ValueError(f"need N >= 10 r = {10 * spec.range} cells, got {n_cells}")
    dim = 4 * n_cells + 1
    h = np.zeros((dim, dim))
    left_cells = list(range(-n_cells, 0))
    right_cells = list(range(1, n_cells + 1))
    _place_blocks(h, lambda j: slice(2 * j, 2 * j + 2), spec.left, left_cells)
    mid = 2 * n_cells
    _place_blocks(h, lambda j: slice(mid + 1 + 2 * j, mid + 3 + 2 * j), spec.right, right_cells)
    h[mid, mid] = spec.w
    h[mid, mid - 2:mid] = spec.b_left
    h[mid - 2:mid, mid] = spec.b_left
    h[mid, mid + 1:mid + 3] = spec.b_right
    h[mid + 1:mid + 3, mid] = spec.b_right
    row_cells = np.concatenate([np.repeat(left_cells, 2), [0], np.repeat(right_cells, 2)])
    orbital = np.concatenate([np.tile([0, 1], n_cells), [-1], np.tile([0, 1], n_cells)])
    return FiniteTruncation(h, row_cells, orbital, "interface", spec.range, (-n_cells, n_cells))


def eigensolve(trunc):
    """Full ascending spectrum and eigenvectors, with a residual check."""
    w, v = eigen.eigh(trunc.matrix)
    norm = max(1.0, np.abs(trunc.matrix).sum(axis=1).max())
    resid = np.abs(trunc.matrix @ v - v * w).max(initial=0.0)
    if resid > 1e-9 * norm:
        raise eigen.EigenConvergenceError(f"eigenpair residual {resid:.3e} exceeds 1e-9 ||H||")
    return w, v


def grading_matrix(trunc, gamma):
    """Sublattice grading on the truncation.

    Right cells carry ``gamma``; on an interface truncation the left cells
    carry ``-gamma`` and the extra site ``-1`` (the labels are swapped across
    the dislocation). A standalone left half-space carries ``gamma``.
    """
    gamma = np.asarray(gamma, dtype=float)
    g = np.zeros((trunc.dim, trunc.dim))
    for c in np.unique(trunc.cells):
        rows = np.flatnonzero((trunc.cells == c) & (trunc.orbital >= 0))
        sign = -1.0 if (trunc.kind == "interface" and c < 0) else 1.0
        if rows.size:
            g[np.ix_(rows, rows)] = sign * gamma
    centre = np.flatnonzero(trunc.orbital < 0)
    g[centre, centre] = -1.0
    return g


def _graded_bases(grading):
    w, v = eigen.eigh(grading)
    return v[:, w > 0], v[:, w < 0]


def _localize(vectors, mask):
    """Rotate an orthonormal set to diagonalize its boundary weight."""
    if vectors.shape[1] == 0:
        return vectors, np.zeros(0)
    sub = vectors[mask]
    weight_op = sub.T @ sub
    weights, rot = eigen.eigh(0.5 * (weight_op + weight_op.T))
    return vectors @ rot, np.clip(weights, 0.0, 1.0)


def chiral_kernels(trunc, gamma, zero_tol=ZERO_TOL):
    """Near-kernels of ``H_{+-}`` and ``H_{-+}`` after boundary filtering.

    Returns two arrays of column vectors in the full row space. Kernel
    dimensions are counted from singular values of the off-diagonal block
    below ``zero_tol``; vectors concentrated on an artificial cut are dropped.
    """
    h = trunc.matrix
    g = grading_matrix(trunc, gamma)
    scale = max(1.0, np.abs(h).max())
    resid = np.abs(h @ g + g @ h).max()
    if resid > 1e-12 * scale:
        raise SymmetryError(f"truncation does not anticommute with the grading (residual {resid:.2e})")
    p_plus, p_minus = _graded_bases(g)
    block = p_minus.T @ h @ p_plus  # H_{+-}: + -> -
    u, sv, wt = np.linalg.svd(block, full_matrices=True)
    near = (sv > zero_tol / 10) & (sv < zero_tol * 10)
    if np.any(near):
        warnings.warn(
            f"singular values {sv[near]} lie within a factor 10 of zero_tol={zero_tol:g}; kernel count is ambiguous",
            RuntimeWarning,
            stacklevel=2,
        )
    n_small = int(np.sum(sv < zero_tol))
    rank = sv.size - n_small
    ker_plus = p_plus @ wt[rank:].T
    ker_minus = p_minus @ u[:, rank:]
    mask = trunc.boundary_mask()
    kept = []
    for vecs in (ker_plus, ker_minus):
        vecs, weights = _localize(vecs, mask)
        kept.append(vecs[:, weights < BOUNDARY_WEIGHT_MAX])
    return kept[0], kept[1]


def chiral_index(trunc, gamma, zero_tol=ZERO_TOL):
    """``dim ker H_{+-} - dim ker H_{-+}`` with boundary-artifact filtering."""
    plus, minus = chiral_kernels(trunc, gamma, zero_tol)
    return plus.shape[1] - minus.shape[1]


def _decay_length(cells, amp2):
    """Exponential decay length (cells) of a mode from its per-cell amplitude."""
    labels = np.unique(cells)
    per_cell = np.array([amp2[cells == c].sum() for c in labels])
    amp = np.sqrt(per_cell)
    peak = labels[np.argmax(amp)]
    dist = np.abs(labels - peak)
    top = amp.max()
    profile = np.array([amp[dist == d].max() for d in range(dist.max() + 1)])
    floor = 1e-12 * top
    below = np.flatnonzero(profile < floor)
    stop = below[0] if below.size else profile.size - 1
    stop = max(stop, 1)
    d = np.arange(stop + 1)
    logs = np.log(np.maximum(profile[: stop + 1], floor) / top)
    slope = np.polyfit(d, logs, 1)[0]
    if slope >= 0:
        return float("inf")
    return float(-1.0 / slope)


def mode_report(trunc, energy, vector):
    amp2 = vector ** 2
    amp2 = amp2 / amp2.sum()
    center = float(np.sum(amp2 * trunc.cells))
    boundary = float(amp2[trunc.boundary_mask()].sum())
    return ModeReport(float(energy), center, _decay_length(trunc.cells, amp2), boundary, trunc.cells.copy(), vector.copy())


def in_gap_modes(trunc, gap, window=None, cluster_tol=1e-9):
    """Eigenmodes of the truncation inside ``window`` (default: the bulk gap).

    Numerically degenerate eigenvalues are grouped and the group is rotated to
    separate modes on the artificial cuts from genuine edge or interface modes;
    only modes with boundary weight below 0.01 are returned.
    """
    if window is None:
        if not gap.gapped:
            raise GapClosedError("bulk gap is closed; no in-gap window")
        window = (gap.lower, gap.upper)
    lo, hi = window
    w, v = eigensolve(trunc)
    tol = cluster_tol * max(1.0, np.abs(w).max())
    # the window is open; levels within rounding of its ends count as outside
    inside = np.flatnonzero((w > lo + tol) & (w < hi - tol))
    if inside.size == 0:
        return []
    groups = [[inside[0]]]
    for i in inside[1:]:
        if w[i] - w[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    mask = trunc.boundary_mask()
    reports = []
    for grp in groups:
        vecs, weights = _localize(v[:, grp], mask)
        energies = w[grp]
        for j in range(vecs.shape[1]):
            vec = vecs[:, j]
            e = float(vec @ trunc.matrix @ vec)
            if len(grp) == 1:
                e = float(energies[0])
            rep = mode_report(trunc, e, vec)
            if rep.accepted:
                reports.append(rep)
    return reports


def ssh_interface(s, t, u_left=None, u_right=None, w=0.0):
    """The SSH interface model: intracell ``s``, intercell ``t``, interface hoppings ``u``."""
    a = np.array([[0.0, 0.0], [t, 0.0]])
    bulk = HoppingModel([a], s * SIGMA1)
    u_left = t if u_left is None else u_left
    u_right = t if u_right is None else u_right
    return InterfaceSpec(bulk, bulk, [0.0, u_left], [u_right, 0.0], w)


def verify_ssh(s, t, u_left, u_right, n_cells=100, zero_tol=ZERO_TOL, strict=True):
    """Count interface zero modes of the chiral SSH interface model.

    The count (from the chiral kernels) must be odd; with ``strict`` an even
    count raises. The eigenvalue count ``|E| < zero_tol`` after boundary
    filtering is returned alongside as a cross-check.
    """
    if abs(abs(s) - abs(t)) < 1e-10 * max(1.0, abs(s), abs(t)):
        raise GapClosedError(f"|s| = |t| = {abs(s):g}: the SSH bulk is gapless")
    spec = ssh_interface(s, t, u_left, u_right, 0.0)
    trunc = build_interface(spec, n_cells)
    plus, minus = chiral_kernels(trunc, SIGMA3, zero_tol)
    modes = in_gap_modes(trunc, None, window=(-zero_tol, zero_tol))
    result = ZeroModeCount(plus.shape[1] + minus.shape[1], plus.shape[1] - minus.shape[1], len(modes), tuple(modes))
    if strict and not result.odd:
        raise GapClosedError(f"even zero-mode count {result.count} for s={s}, t={t}")
    return result


def verify_nn_no_nonzero_ingap(model, n_cells=100, zero_tol=ZERO_TOL):
    """True iff the right half-space has no in-gap eigenvalue other than 0.

    Guaranteed for chiral nearest-neighbour models; longer-range chiral
    models may host ``+-E`` pairs.
    """
    if not is_chiral(model):
        raise SymmetryError("model must be chiral symmetric")
    _, gap = band_spectrum(model)
    if not gap.gapped:
        raise GapClosedError("bulk gap around 0 is closed")
    trunc = build_half_space(model, "right", n_cells)
    modes = in_gap_modes(trunc, gap)
    return all(abs(m.energy) < zero_tol for m in modes)


def dislocation_spec(model, b_left, b_right, w):
    """Dislocation model: the same P,T-symmetric bulk on both sides."""
    return InterfaceSpec(model, model, b_left, b_right, w)


def _canonical_spec(spec):
    u = canonical_basis(spec.right)
    if not np.allclose(canonical_basis(spec.left), u):
        raise ModelError("left and right bulks use different reflection axes")
    return InterfaceSpec(
        to_canonical(spec.left), to_canonical(spec.right), spec.b_left @ u, spec.b_right @ u, spec.w
    )


def interface_term_norm(spec, zak=None):
    """Spectral norm of the interface term of a dislocation model.

    The interface term is the finitely supported difference between the
    interface Hamiltonian and the decoupled reference: ``H_L (+) v0 (+) H_R``
    when the bulk Zak phase is 0, and ``H_L' (+) H_0 (+) H_R'`` when it is pi,
    where ``H_0`` couples the two open sites next to the interface to the
    extra site with amplitude ``t`` and the primed half-spaces are the
    half-cell shifted remainders.
    """
    spec = _canonical_spec(spec)
    decomp = snn_decompose(spec.right)
    if zak is None:
        zak = zak_phase(spec.right)
    n = 10 * spec.range
    trunc = build_interface(spec, n)
    h = trunc.matrix
    mid = 2 * n
    ideal = h.copy()
    if zak == 0:
        centre = [mid]
        ideal[mid, mid] = decomp.v0
    else:
        centre = [mid - 1, mid, mid + 1]
        ideal[np.ix_(centre, centre)] = [
            [h[mid - 1, mid - 1], decomp.t, 0.0],
            [decomp.t, decomp.v0, decomp.t],
            [0.0, decomp.t, h[mid + 1, mid + 1]],
        ]
    rest = np.setdiff1d(np.arange(trunc.dim), centre)
    ideal[np.ix_(centre, rest)] = 0.0
    ideal[np.ix_(rest, centre)] = 0.0
    diff = h - ideal
    return float(np.abs(eigen.eigvalsh(diff)).max())
