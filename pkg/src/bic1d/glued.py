"""Interface modes of two periodic media glued at ``x = 0``.

The left medium fills ``x < 0`` and the right medium ``x > 0``; ``u`` and the
flux ``v`` (``u'/mu`` or ``u'``) are continuous at the junction. An interface
mode at a common-gap energy exists exactly when the impedance of the solution
decaying to the left matches the one decaying to the right.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .continuum import PeriodicMedium, band_structure, bulk_index, impedance, transfer
from .errors import BracketingError, ModelError, NumericalError

__all__ = [
    "GluedSystem",
    "InterfaceModeResult",
    "ModeProfile",
    "common_gap",
    "glue",
    "dislocate",
    "matching_function",
    "scan_interface_modes",
    "find_interface_mode",
    "mode_profile",
]

EDGE_INSET = 1e-6
SCAN_POINTS = 400
RESIDUAL_MAX = 1e-9
DECAY_TARGET = 1e-6


def _gap_of(medium, j):
    bands = band_structure(medium, j, k_samples=3)
    return bands.gap(j)


def common_gap(left, right, m_left=1, m_right=1):
    """Intersection of gap ``m_left`` of ``left`` with gap ``m_right`` of ``right``; None if empty."""
    a = _gap_of(left, m_left)
    b = _gap_of(right, m_right)
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    if hi <= lo:
        return None
    return (lo, hi)


@dataclass(frozen=True, eq=False)
class GluedSystem:
    left: PeriodicMedium
    right: PeriodicMedium
    gap: tuple
    gamma_left: str
    gamma_right: str
    m_left: int = 1
    m_right: int = 1

    @property
    def predicted(self):
        """A unique mode is guaranteed when the two bulk indices differ."""
        return self.gamma_left != self.gamma_right


def glue(left, right, m_left=1, m_right=1):
    if left.kind != right.kind:
        raise ModelError(f"cannot glue a {left.kind} medium to a {right.kind} medium")
    gap = common_gap(left, right, m_left, m_right)
    if gap is None:
        raise ModelError(f"gap {m_left} of the left medium and gap {m_right} of the right medium do not overlap")
    return GluedSystem(
        left,
        right,
        gap,
        bulk_index(left, m_left).gamma,
        bulk_index(right, m_right).gamma,
        m_left,
        m_right,
    )


def dislocate(medium):
    """The medium shifted by half a period, ``eps_2(x) = eps_1(x - 1/2)``."""
    # the profile seen from the new origin starts at old position 1/2
    out, pos = [], 0.0
    pieces = list(medium.pieces)
    for p in pieces:
        start, end = pos, pos + p[0]
        pos = end
        if end <= 0.5 + 1e-15:
            out.append(("tail", p))
        elif start >= 0.5 - 1e-15:
            out.append(("head", p))
        else:
            out.append(("tail", (0.5 - start, *p[1:])))
            out.append(("head", (end - 0.5, *p[1:])))
    head = [p for tag, p in out if tag == "head"]
    tail = [p for tag, p in out if tag == "tail"]
    rotated = head + tail
    total = sum(p[0] for p in rotated)
    rotated = [(p[0] / total, *p[1:]) for p in rotated]
    return PeriodicMedium(medium.kind, rotated)


@dataclass(frozen=True, eq=False)
class ModeProfile:
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray  # eps(x) for photonic media, 1 otherwise
    norm: float  # scale applied to reach unit weighted L2 norm


@dataclass(frozen=True, eq=False)
class InterfaceModeResult:
    energy: float
    residual: float
    chart: str  # "xi" or "reciprocal"
    state: tuple  # (u(0), v(0)) before normalization
    decay_left: float  # per period, > 0
    decay_right: float
    multiplier_left: float
    multiplier_right: float
    predicted: bool
    reliable: bool
    profile: ModeProfile = field(default=None, repr=False)


def matching_function(glued, energy):
    """``xi_L^(1)(E) - xi_R^(2)(E)`` and the chart it was evaluated in.

    Where either impedance has a pole the reciprocal form
    ``1/xi_L - 1/xi_R`` is returned with chart ``"reciprocal"``.
    """
    zl = impedance(glued.left, "left", energy)
    zr = impedance(glued.right, "right", energy)
    if zl.pole or zr.pole:
        return zl.reciprocal - zr.reciprocal, "reciprocal", zl, zr
    return zl.xi - zr.xi, "xi", zl, zr


def _interior(glued):
    lo, hi = glued.gap
    pad = EDGE_INSET * (hi - lo)
    return lo + pad, hi - pad


def _result(glued, energy, with_profile=True):
    value, chart, zl, zr = matching_function(glued, energy)
    residual = abs(value)
    if chart == "xi" and max(abs(zl.xi), abs(zr.xi)) > 1.0:
        # compare directions rather than values when the impedances are large
        residual = abs(zl.state[0] * zr.state[1] - zl.state[1] * zr.state[0])
    lo, hi = _interior(glued)
    width = glued.gap[1] - glued.gap[0]
    reliable = min(energy - glued.gap[0], glued.gap[1] - energy) > 10 * EDGE_INSET * width
    res = InterfaceModeResult(
        float(energy),
        float(residual),
        chart,
        zr.state,
        zl.decay_rate,
        zr.decay_rate,
        zl.multiplier,
        zr.multiplier,
        glued.predicted,
        bool(reliable),
    )
    if with_profile:
        half_width = max(20, math.ceil(-math.log(DECAY_TARGET / 10) / min(res.decay_left, res.decay_right)))
        object.__setattr__(res, "profile", mode_profile(glued, res, half_width))
    return res


def scan_interface_modes(glued, n=SCAN_POINTS, with_profile=True):
    """All matching roots found by a sign-change scan of the matching function over the gap."""
    lo, hi = _interior(glued)
    es = np.linspace(lo, hi, int(n))
    vals = [matching_function(glued, e) for e in es]
    roots = []
    for i in range(len(es) - 1):
        (f0, c0, *_), (f1, c1, *_) = vals[i], vals[i + 1]
        if c0 != c1:
            # chart change between samples: bracket in the chart valid at both ends if possible
            continue
        if f0 == 0.0:
            roots.append(es[i])
        elif f0 * f1 < 0:
            chart = c0

            def f(e, chart=chart):
                val, c, *_ = matching_function(glued, e)
                if c != chart:
                    raise BracketingError("impedance pole inside a matching bracket")
                return val

            roots.append(brentq(f, es[i], es[i + 1], xtol=1e-12 * max(1.0, hi - lo), rtol=1e-15))
    if vals[-1][0] == 0.0:
        roots.append(es[-1])
    return [_result(glued, e, with_profile) for e in roots]


def find_interface_mode(glued, with_profile=True):
    """The interface mode in the common gap, or None.

    With different bulk indices the matching function is strictly increasing
    on the gap and its unique root is bracketed directly from the inset gap
    ends. With equal indices no mode is predicted; a grid scan reports
    whatever it finds and the result is flagged ``predicted=False``.
    """
    if not glued.predicted:
        found = scan_interface_modes(glued, with_profile=with_profile)
        if len(found) > 1:
            warnings.warn(f"{len(found)} matching roots found; returning the lowest", RuntimeWarning, stacklevel=2)
        return found[0] if found else None
    lo, hi = _interior(glued)
    f_lo, c_lo, *_ = matching_function(glued, lo)
    f_hi, c_hi, *_ = matching_function(glued, hi)
    if c_lo != "xi" or c_hi != "xi" or not f_lo < 0 < f_hi:
        # fall back to the scan, which handles charts piecewise
        found = scan_interface_modes(glued, with_profile=with_profile)
        if len(found) != 1:
            raise BracketingError(
                f"expected exactly one matching root in ({lo:.12g}, {hi:.12g}), found {len(found)}"
            )
        return found[0]
    energy = brentq(
        lambda e: matching_function(glued, e)[0],
        lo,
        hi,
        xtol=1e-12 * max(1.0, hi - lo),
        rtol=1e-15,
        maxiter=500,
    )
    res = _result(glued, energy, with_profile)
    if res.residual > RESIDUAL_MAX:
        raise NumericalError(f"matching residual {res.residual:.3e} at E={energy:.15g} exceeds {RESIDUAL_MAX:g}")
    return res


def _period_states(medium, energy, state, lam, x_local):
    """State at local offsets ``x_local`` in [0, 1] of a cell starting from ``state``."""
    out = np.empty((x_local.size, 2))
    for i, x in enumerate(x_local):
        out[i] = transfer(medium, energy, 0.0, x) @ state
    return out


def mode_profile(glued, mode, half_width=20, samples_per_period=64):
    """Sampled ``(u, v)`` of an interface mode on ``[-X, X]``, unit eps-weighted L2 norm.

    Each side is built from one propagated period and the Floquet multiplier,
    ``psi(x + n) = lam^n psi(x)``, which avoids integrating growing solutions.
    """
    energy = mode.energy
    half_width = int(half_width)
    zl = impedance(glued.left, "left", energy)
    zr = impedance(glued.right, "right", energy)
    sr = np.array(zr.state)
    sl = np.array(zl.state)
    # match the left state to the right one (they are parallel at a mode)
    k = int(np.argmax(np.abs(sr)))
    sl = sl * (sr[k] / sl[k])
    local = np.linspace(0.0, 1.0, int(samples_per_period) + 1)[:-1]
    right_cell = _period_states(glued.right, energy, sr, zr.multiplier, local)
    # on the left, the state at x = -m is lam^{-m} sl; propagate within each period from there
    left_cell = _period_states(glued.left, energy, sl, zl.multiplier, local)
    xs, states = [], []
    for m in range(half_width, 0, -1):
        xs.append(local - m)
        states.append(left_cell * zl.multiplier ** (-m))
    for n in range(half_width):
        xs.append(local + n)
        states.append(right_cell * zr.multiplier ** n)
    xs.append(np.array([float(half_width)]))
    states.append((transfer(glued.right, energy, 0.0, 1.0) @ sr * zr.multiplier ** (half_width - 1))[None, :])
    x = np.concatenate(xs)
    st = np.concatenate(states)
    weight = np.where(x < 0, glued.left.eps(x), glued.right.eps(x))
    norm = math.sqrt(np.trapezoid(weight * st[:, 0] ** 2, x))
    u, v = st[:, 0] / norm, st[:, 1] / norm
    peak = np.abs(u).max()
    if max(abs(u[0]), abs(u[-1])) > DECAY_TARGET * peak:
        raise NumericalError(
            f"half-width X={half_width} too small: |psi(+-X)| = {max(abs(u[0]), abs(u[-1])):.2e} "
            f"exceeds {DECAY_TARGET:g} max|psi|"
        )
    return ModeProfile(x, u, v, weight, norm)
