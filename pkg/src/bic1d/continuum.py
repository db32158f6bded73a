"""Floquet-Bloch analysis of period-one, inversion-symmetric 1D media.

Two operators are supported. Photonic: ``-(1/eps) (u'/mu)' = E u`` with state
``(u, u'/mu)``. Schrodinger: ``-u'' + V u = E u`` with state ``(u, u')``.
On a constant piece of length ``l`` both reduce to ``y' = G y`` with a
trace-free ``G`` whose square is ``-z I``, so the propagator is
``C(z) I + S(z) G`` with ``C = cos(sqrt(z) l)`` and ``S = sin(sqrt(z) l)/sqrt(z)``.

Each period is stored as the piece list on ``[0, 1)``; inversion symmetry about
``x = 0`` is then the statement that the list is a palindrome.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketingError, ClassificationError, GapClosedError, ModelError, NumericalError, SymmetryError

__all__ = [
    "PARITY_TOL",
    "PeriodicMedium",
    "BandEdge",
    "BandStructure",
    "EdgeParity",
    "BulkIndex",
    "ImpedanceValue",
    "ImpedanceCurve",
    "transfer",
    "monodromy",
    "monodromy_discriminant",
    "discriminant_derivative",
    "band_structure",
    "edge_parity",
    "bulk_index",
    "impedance",
    "impedance_curve",
    "floquet_multipliers",
]

PARITY_TOL = 1e-7
LENGTH_TOL = 1e-12
POLE_TOL = 1e-12
GAP_CLOSE_TOL = 1e-10
SCAN_REFINE = 8  # scan step is the nominal step divided by this


@dataclass(frozen=True, eq=False)
class PeriodicMedium:
    """Piecewise-constant period-one medium.

    ``pieces`` are ``(length, eps, mu)`` for ``kind="photonic"`` and
    ``(length, V)`` for ``kind="schrodinger"``, listed from ``x = 0``.
    Adjacent pieces with identical coefficients are merged on construction.
    """

    kind: str
    pieces: tuple

    def __post_init__(self):
        if self.kind not in ("photonic", "schrodinger"):
            raise ModelError(f"kind must be 'photonic' or 'schrodinger', got {self.kind!r}")
        width = 3 if self.kind == "photonic" else 2
        rows = []
        for i, p in enumerate(self.pieces):
            p = tuple(float(x) for x in p)
            if len(p) != width:
                raise ModelError(f"piece {i}: expected {width} numbers for a {self.kind} medium, got {len(p)}")
            if not all(math.isfinite(x) for x in p):
                raise ModelError(f"piece {i}: non-finite value {p}")
            if p[0] <= 0:
                raise ModelError(f"piece {i}: lengths must be positive, got {p[0]}")
            if width == 3 and (p[1] <= 0 or p[2] <= 0):
                raise ModelError(f"piece {i}: eps and mu must be positive, got {p[1:]}")
            rows.append(p)
        if not rows:
            raise ModelError("a medium needs at least one piece")
        total = sum(p[0] for p in rows)
        if abs(total - 1.0) > LENGTH_TOL:
            raise ModelError(f"piece lengths must sum to 1, got {total!r}")
        merged = [rows[0]]
        for p in rows[1:]:
            if p[1:] == merged[-1][1:]:
                merged[-1] = (merged[-1][0] + p[0], *p[1:])
            else:
                merged.append(p)
        rev = merged[::-1]
        for a, b in zip(merged, rev):
            if a[1:] != b[1:] or abs(a[0] - b[0]) > LENGTH_TOL:
                raise SymmetryError(
                    "medium is not inversion symmetric about x=0 (piece list is not a palindrome)"
                )
        object.__setattr__(self, "pieces", tuple(merged))

    @property
    def lengths(self):
        return np.array([p[0] for p in self.pieces])

    @property
    def breakpoints(self):
        return np.concatenate([[0.0], np.cumsum(self.lengths)])

    def _coefficients(self):
        """Per-piece ``(length, g01, c, w)`` with ``G = [[0, g01], [-(c E - w), 0]]``."""
        if self.kind == "photonic":
            return [(p[0], p[2], p[1], 0.0) for p in self.pieces]
        return [(p[0], 1.0, 1.0, p[1]) for p in self.pieces]

    def piece_at(self, x):
        """Index of the piece containing ``x`` (periodically extended)."""
        frac = np.mod(x, 1.0)
        idx = np.searchsorted(self.breakpoints[1:-1], frac, side="right")
        return idx

    def eps(self, x):
        if self.kind != "photonic":
            return np.ones_like(np.asarray(x, dtype=float))
        vals = np.array([p[1] for p in self.pieces])
        return vals[self.piece_at(x)]

    def mu(self, x):
        if self.kind != "photonic":
            return np.ones_like(np.asarray(x, dtype=float))
        vals = np.array([p[2] for p in self.pieces])
        return vals[self.piece_at(x)]

    def potential(self, x):
        if self.kind != "schrodinger":
            return np.zeros_like(np.asarray(x, dtype=float))
        vals = np.array([p[1] for p in self.pieces])
        return vals[self.piece_at(x)]

    def max_index(self):
        """Largest ``eps * mu`` (1 for Schrodinger)."""
        if self.kind != "photonic":
            return 1.0
        return max(p[1] * p[2] for p in self.pieces)

    def min_index(self):
        if self.kind != "photonic":
            return 1.0
        return min(p[1] * p[2] for p in self.pieces)

    def same_as(self, other, tol=1e-12):
        if self.kind != other.kind or len(self.pieces) != len(other.pieces):
            return False
        return all(np.allclose(a, b, rtol=0, atol=tol) for a, b in zip(self.pieces, other.pieces))

    def __repr__(self):
        return f"PeriodicMedium({self.kind!r}, {list(self.pieces)})"


def _cs(z, ell):
    """``C(z)``, ``S(z)`` and their z-derivatives, vectorized over ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    x = z * ell * ell
    c = np.empty_like(z)
    s = np.empty_like(z)
    dc = np.empty_like(z)
    ds = np.empty_like(z)
    small = np.abs(x) < 1e-3
    pos = (~small) & (z > 0)
    neg = (~small) & (z < 0)
    xs = x[small]
    c[small] = 1 - xs / 2 + xs ** 2 / 24 - xs ** 3 / 720
    s[small] = ell * (1 - xs / 6 + xs ** 2 / 120 - xs ** 3 / 5040)
    ds[small] = ell ** 3 * (-1 / 6 + xs / 60 - xs ** 2 / 1680 + xs ** 3 / 90720)
    r = np.sqrt(z[pos])
    c[pos] = np.cos(r * ell)
    s[pos] = np.sin(r * ell) / r
    r = np.sqrt(-z[neg])
    c[neg] = np.cosh(r * ell)
    s[neg] = np.sinh(r * ell) / r
    big = ~small
    ds[big] = (ell * c[big] - s[big]) / (2 * z[big])
    dc = -0.5 * ell * s
    return c, s, dc, ds


def _piece_matrices(coef, energies, ell=None, with_derivative=False):
    length, g01, cc, w = coef
    ell = length if ell is None else ell
    g10 = -(cc * energies - w)
    z = -g01 * g10
    c, s, dc, ds = (a.reshape(np.shape(energies)) for a in _cs(z, ell))
    m = np.empty(energies.shape + (2, 2))
    m[..., 0, 0] = c
    m[..., 0, 1] = s * g01
    m[..., 1, 0] = s * g10
    m[..., 1, 1] = c
    if not with_derivative:
        return m, None
    dz = g01 * cc
    dm = np.empty_like(m)
    dm[..., 0, 0] = dc * dz
    dm[..., 0, 1] = ds * dz * g01
    dm[..., 1, 0] = ds * dz * g10 - s * cc
    dm[..., 1, 1] = dc * dz
    return m, dm


def _monodromy_and_derivative(medium, energies):
    energies = np.asarray(energies, dtype=float)
    m = np.broadcast_to(np.eye(2), energies.shape + (2, 2)).copy()
    dm = np.zeros_like(m)
    for coef in medium._coefficients():
        p, dp = _piece_matrices(coef, energies, with_derivative=True)
        dm = dp @ m + p @ dm
        m = p @ m
    return m, dm


def _check_det(m):
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    scale = max(1.0, float(np.abs(m).max()) ** 2)
    if abs(det - 1.0) > 1e-12 * scale:
        raise NumericalError(f"transfer matrix determinant {det!r} deviates from 1")
    return m


def transfer(medium, energy, a=0.0, b=1.0):
    """Transfer matrix taking the state at ``x = a`` to ``x = b`` (``a <= b``)."""
    if b < a:
        raise ValueError(f"transfer needs a <= b, got a={a}, b={b}")
    e = np.asarray(float(energy))
    coefs = medium._coefficients()
    bps = medium.breakpoints
    m = np.eye(2)
    x = float(a)
    while b - x > 1e-15 * max(1.0, abs(b)):
        base = math.floor(x)
        frac = x - base
        idx = int(np.searchsorted(bps[1:], frac, side="right"))
        idx = min(idx, len(coefs) - 1)
        end = min(base + bps[idx + 1], b)
        if end - x <= 0:
            # numerically on the right breakpoint; step into the next piece
            x = base + bps[idx + 1]
            continue
        p, _ = _piece_matrices(coefs[idx], e, ell=end - x)
        m = p @ m
        x = end
    return _check_det(m)


def monodromy(medium, energy):
    """Transfer matrix over one period ``[0, 1]``."""
    m, _ = _monodromy_and_derivative(medium, np.asarray(float(energy)))
    return _check_det(m)


def monodromy_discriminant(medium, energy):
    """``D(E) = tr M(E)``; vectorized over ``energy``."""
    m, _ = _monodromy_and_derivative(medium, energy)
    return m[..., 0, 0] + m[..., 1, 1]


def discriminant_derivative(medium, energy):
    _, dm = _monodromy_and_derivative(medium, energy)
    return dm[..., 0, 0] + dm[..., 1, 1]


@dataclass(frozen=True)
class BandEdge:
    band: int  # 1-based
    side: str  # "lower" or "upper"
    energy: float
    k: float  # 0 or pi


@dataclass(frozen=True)
class EdgeParity:
    band: int
    side: str
    k: float
    parity: str  # "even" or "odd"
    state: tuple


@dataclass(frozen=True, eq=False)
class BandStructure:
    k: np.ndarray
    energies: np.ndarray  # (n_bands, n_k)
    edges: tuple  # (lower, upper) BandEdge pairs per band
    gaps: tuple  # (lower, upper) energy pairs between band j and j + 1
    gap_open: tuple
    scan_interval: tuple

    @property
    def n_bands(self):
        return self.energies.shape[0]

    def gap(self, j):
        """Open interval of gap ``j`` (between bands ``j`` and ``j + 1``)."""
        if not self.gap_open[j - 1]:
            raise GapClosedError(f"gap {j} is closed (edges touch at E={self.gaps[j - 1][0]:.12g})")
        return self.gaps[j - 1]

    def gap_momentum(self, j):
        return self.edges[j - 1][1].k


def _start_energy(medium):
    if medium.kind == "photonic":
        return 0.0
    return min(p[1] for p in medium.pieces) - 1.0


def _ceiling(medium, n_bands):
    base = ((n_bands + 2) * np.pi) ** 2
    if medium.kind == "photonic":
        return base / min(medium.min_index(), 1.0)
    return base + max(p[1] for p in medium.pieces)


def _scan_step(medium):
    return (np.pi ** 2 / 4) * min(1.0, 1.0 / medium.max_index()) / SCAN_REFINE


def _extrema(medium, start, ceiling, count):
    """First ``count`` critical points of ``D`` above ``start``."""
    step = _scan_step(medium)
    grid = np.arange(start, ceiling + step, step)
    if grid.size < 2:
        grid = np.array([start, ceiling])
    dd = discriminant_derivative(medium, grid)
    found = []
    for i in range(grid.size - 1):
        if dd[i] == 0.0 and i > 0:
            found.append(grid[i])
        elif dd[i] * dd[i + 1] < 0:
            root = brentq(lambda e: float(discriminant_derivative(medium, e)), grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15)
            found.append(root)
        if len(found) >= count:
            return found
    return None


def _solve_monotone(medium, target, lo, hi):
    f = lambda e: float(monodromy_discriminant(medium, e)) - target  # noqa: E731
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketingError(f"D(E) = {target} not bracketed on [{lo:.12g}, {hi:.12g}]")
    return brentq(f, lo, hi, xtol=1e-15 * max(1.0, abs(hi)), rtol=1e-15, maxiter=500)


def _band_edges(medium, n_bands):
    start = _start_energy(medium)
    ceiling = _ceiling(medium, n_bands)
    for _ in range(8):
        ext = _extrema(medium, start, ceiling, n_bands + 1)
        if ext is not None:
            break
        ceiling *= 2
    else:
        raise BracketingError(
            f"could not find {n_bands + 1} critical points of D on [{start:.6g}, {ceiling:.6g}]"
        )
    bounds = [start, *ext]
    d_at = monodromy_discriminant(medium, np.array(bounds))
    bands = []
    for j in range(n_bands + 1):
        lo, hi = bounds[j], bounds[j + 1]
        # D runs from +-2 (or beyond) to -+2 (or beyond) on a monotone segment
        d_lo = d_at[j]
        sign = 1.0 if d_lo > 0 else -1.0
        k_lo = 0.0 if sign > 0 else np.pi
        k_hi = np.pi - k_lo
        if j == 0 and medium.kind == "photonic":
            e_lo = 0.0
        elif abs(d_lo) < 2 + GAP_CLOSE_TOL:
            e_lo = lo
        else:
            e_lo = _solve_monotone(medium, 2 * sign, lo, hi)
        d_hi = d_at[j + 1]
        if abs(d_hi) < 2 + GAP_CLOSE_TOL:
            e_hi = hi
        else:
            e_hi = _solve_monotone(medium, -2 * sign, lo, hi)
        bands.append((BandEdge(j + 1, "lower", e_lo, k_lo), BandEdge(j + 1, "upper", e_hi, k_hi)))
    return bands, (start, ceiling)


def band_structure(medium, n_bands, k_samples=65):
    """Dispersion ``E_j(k)`` on a uniform grid of ``[0, pi]`` plus band edges and gaps."""
    n_bands = int(n_bands)
    if n_bands < 1:
        raise ValueError("n_bands must be >= 1")
    bands, interval = _band_edges(medium, n_bands)
    k = np.linspace(0.0, np.pi, int(k_samples))
    energies = np.empty((n_bands, k.size))
    for j in range(n_bands):
        lower, upper = bands[j]
        for i, kk in enumerate(k):
            target = 2 * np.cos(kk)
            if np.isclose(kk, lower.k):
                energies[j, i] = lower.energy
            elif np.isclose(kk, upper.k):
                energies[j, i] = upper.energy
            else:
                energies[j, i] = _solve_monotone(medium, target, lower.energy, upper.energy)
    gaps, gap_open = [], []
    for j in range(n_bands):
        top = bands[j][1]
        bottom = bands[j + 1][0]
        if top.k != bottom.k:
            raise NumericalError(f"edges of gap {j + 1} sit at different momenta ({top.k}, {bottom.k})")
        gaps.append((top.energy, bottom.energy))
        gap_open.append(bottom.energy - top.energy > GAP_CLOSE_TOL * max(1.0, abs(top.energy)))
    # edges cover one band more than requested so the last gap is known
    return BandStructure(k, energies, tuple(bands), tuple(gaps), tuple(gap_open), interval)


def _null_vector(a):
    """Unit null vector of a rank-one 2x2 matrix, from its larger row."""
    rows = np.abs(a).sum(axis=1)
    r = a[int(np.argmax(rows))]
    v = np.array([-r[1], r[0]])
    n = np.hypot(*v)
    if n == 0:
        raise ClassificationError("degenerate edge: monodromy equals +-I, eigenspace is two-dimensional")
    return v / n


def edge_parity(medium, edge):
    """Parity of the Bloch mode at a band edge.

    The monodromy eigenvector ``(u(0), v(0))`` for eigenvalue ``+1`` (``k = 0``)
    or ``-1`` (``k = pi``) is odd when ``u(0)`` vanishes and even when ``v(0)``
    vanishes, relative to ``PARITY_TOL``.
    """
    m = monodromy(medium, edge.energy)
    lam = 1.0 if edge.k == 0 else -1.0
    a = m - lam * np.eye(2)
    scale = max(1.0, np.abs(m).max())
    if np.abs(a).max() < PARITY_TOL * scale:
        raise ClassificationError(
            f"degenerate edge at E={edge.energy:.12g}: M - ({lam:+g}) I vanishes, parity is not defined"
        )
    u, v = _null_vector(a)
    odd, even = abs(u) < PARITY_TOL, abs(v) < PARITY_TOL
    if odd == even:
        raise ClassificationError(
            f"edge at E={edge.energy:.12g}: eigenvector ({u:.3e}, {v:.3e}) is neither even nor odd; "
            "inversion symmetry broken or edge degenerate"
        )
    return EdgeParity(edge.band, edge.side, edge.k, "odd" if odd else "even", (float(u), float(v)))


@dataclass(frozen=True)
class BulkIndex:
    gap: int
    gamma: str  # parity at the upper edge of band ``gap``
    zak: tuple  # theta_1..theta_j in {0, pi}, or None when a band is not isolated
    consistent: bool  # gamma_j == (-1)^(j-1) exp(i sum theta), None-safe

    @property
    def sign(self):
        return 1 if self.gamma == "even" else -1


def bulk_index(medium, gap, bands=None):
    """Bulk index of gap ``j`` and the Zak phases of bands ``1..j``."""
    j = int(gap)
    if bands is None or bands.n_bands < j:
        bands = band_structure(medium, j, k_samples=3)
    bands.gap(j)
    gamma = edge_parity(medium, bands.edges[j - 1][1]).parity
    isolated = all(bands.gap_open[:j])
    if not isolated:
        warnings.warn("bands are not isolated; Zak phases are not computed", RuntimeWarning, stacklevel=2)
        return BulkIndex(j, gamma, None, True)
    thetas = []
    for m in range(j):
        lo, hi = bands.edges[m]
        p_lo = edge_parity(medium, lo).parity
        p_hi = edge_parity(medium, hi).parity
        thetas.append(0.0 if p_lo == p_hi else float(np.pi))
    flips = sum(1 for th in thetas if th) + (j - 1)
    predicted = "even" if flips % 2 == 0 else "odd"
    if predicted != gamma:
        raise ClassificationError(f"bulk index {gamma} of gap {j} disagrees with Zak phases {thetas}")
    return BulkIndex(j, gamma, tuple(thetas), True)


@dataclass(frozen=True)
class ImpedanceValue:
    energy: float
    side: str
    xi: float  # nan when ``pole``
    pole: bool
    state: tuple  # unit (u(0), v(0)) of the decaying solution
    multiplier: float  # Floquet multiplier of that solution

    @property
    def reciprocal(self):
        """``v(0)/u(0)``; finite at poles of ``xi``."""
        u, v = self.state
        return v / u if u != 0 else float("nan")

    @property
    def decay_rate(self):
        """Decay per period, ``-log |lambda|`` measured away from the interface."""
        lam = abs(self.multiplier)
        return -math.log(lam) if self.side == "right" else math.log(lam)


def floquet_multipliers(medium, energy):
    """Gap multipliers ``(lam_small, lam_large)`` and their unit eigenvectors."""
    m = monodromy(medium, energy)
    d = m[0, 0] + m[1, 1]
    if abs(d) <= 2 + 1e-14:
        raise GapClosedError(f"E={energy:.12g} is not inside a gap (|D| = {abs(d):.15g} <= 2)")
    root = math.sqrt(d * d / 4 - 1)
    lam_big = d / 2 + math.copysign(root, d)
    lam_small = 1.0 / lam_big
    out = []
    for lam in (lam_small, lam_big):
        out.append((lam, _null_vector(m - lam * np.eye(2))))
    return out


def impedance(medium, side, energy):
    """Impedance ``u(0)/v(0)`` of the solution decaying towards ``side``."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    (lam_s, vec_s), (lam_b, vec_b) = floquet_multipliers(medium, energy)
    lam, (u, v) = (lam_s, vec_s) if side == "right" else (lam_b, vec_b)
    pole = abs(v) < POLE_TOL * math.hypot(u, v)
    xi = float("nan") if pole else u / v
    return ImpedanceValue(float(energy), side, xi, bool(pole), (float(u), float(v)), float(lam))


@dataclass(frozen=True, eq=False)
class ImpedanceCurve:
    gap: tuple
    energies: np.ndarray
    xi_left: np.ndarray
    xi_right: np.ndarray
    poles_left: np.ndarray
    poles_right: np.ndarray


def impedance_curve(medium, gap, n=400, inset=1e-6):
    """Sample both impedances on ``n`` points of a gap (ends inset by ``inset * width``)."""
    lo, hi = gap
    pad = inset * (hi - lo)
    es = np.linspace(lo + pad, hi - pad, int(n))
    left = [impedance(medium, "left", e) for e in es]
    right = [impedance(medium, "right", e) for e in es]
    return ImpedanceCurve(
        (lo, hi),
        es,
        np.array([x.xi for x in left]),
        np.array([x.xi for x in right]),
        np.array([x.pole for x in left]),
        np.array([x.pole for x in right]),
    )
