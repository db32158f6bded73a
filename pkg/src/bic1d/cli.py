"""Command-line entry points: ``bands``, ``invariants``, ``edge``, ``interface``, ``dislocate``.

Exit status is 0 on success, 2 for invalid input and 3 for numerical failure.
"""

import argparse
import csv
import io
import sys
import warnings

import numpy as np

from . import continuum, glued, lattice, lattice_interface
from .documents import GluedSpec, dump_document, load_document
from .errors import ModelError, NumericalError

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INVALID", "EXIT_NUMERICAL"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def fmt(x):
    """17 significant digits, so values round-trip exactly."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


class _Usage(ModelError):
    pass


def _write_csv(path, header, rows, stdout):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path in (None, "-"):
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _k_label(k):
    return "pi" if np.isclose(k, np.pi) else fmt(k)


def _parse_window(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise _Usage(f"--window must be 'a,b', got {text!r}") from exc
    if not lo < hi:
        raise _Usage(f"--window needs a < b, got {text!r}")
    return lo, hi


def cmd_bands(args, out):
    model = load_document(args.model)
    if isinstance(model, lattice.HoppingModel):
        bands, gap = lattice.band_spectrum(model, args.k_samples)
        rows = [(k, j + 1, e) for j in range(2) for k, e in zip(bands.k, bands.energies[:, j])]
        _write_csv(args.out, ["k", "band_index", "E"], rows, out)
        if gap.gapped:
            k_lo = bands.k[np.argmax(bands.energies[:, 0])]
            k_hi = bands.k[np.argmin(bands.energies[:, 1])]
            ks = _k_label(k_lo) if np.isclose(k_lo, k_hi) else f"{_k_label(k_lo)},{_k_label(k_hi)}"
            print(f"gap 1: ({fmt(gap.lower)}, {fmt(gap.upper)}) at k*={ks}", file=out if args.out else sys.stderr)
        else:
            print("gap 1: closed", file=out if args.out else sys.stderr)
        return EXIT_OK
    if isinstance(model, continuum.PeriodicMedium):
        bs = continuum.band_structure(model, args.bands, args.k_samples)
        rows = [(k, j + 1, e) for j in range(bs.n_bands) for k, e in zip(bs.k, bs.energies[j])]
        _write_csv(args.out, ["k", "band_index", "E"], rows, out)
        summary = out if args.out else sys.stderr
        for j, (lo, hi) in enumerate(bs.gaps, start=1):
            if bs.gap_open[j - 1]:
                print(f"gap {j}: ({fmt(lo)}, {fmt(hi)}) at k*={_k_label(bs.gap_momentum(j))}", file=summary)
            else:
                print(f"gap {j}: closed at E={fmt(lo)}", file=summary)
        return EXIT_OK
    raise _Usage("bands needs a lattice, photonic or schrodinger document")


def cmd_invariants(args, out):
    model = load_document(args.model)
    if isinstance(model, lattice.HoppingModel):
        zak = "pi" if lattice.zak_phase(model) else "0"
        if lattice.is_chiral(model):
            print(f"winding={lattice.winding_number(model)}, zak={zak}", file=out)
        else:
            print(f"winding: n/a (not chiral), zak={zak}", file=out)
        d = lattice.snn_decompose(model)
        print(f"snn: v0={fmt(d.v0)}, s={fmt(d.s)}, t={fmt(d.t)}, far_norm={fmt(d.far_norm)}, delta={fmt(d.delta)}", file=out)
        return EXIT_OK
    if isinstance(model, continuum.PeriodicMedium):
        bs = continuum.band_structure(model, args.gaps, k_samples=3)
        for j in range(1, args.gaps + 1):
            if not bs.gap_open[j - 1]:
                print(f"gap {j}: closed", file=out)
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                idx = continuum.bulk_index(model, j, bs)
            parts = [f"gamma_{j}={idx.gamma}"]
            if idx.zak is None:
                parts.append("theta: n/a (bands not isolated)")
            else:
                parts += [f"theta_{m}={'pi' if th else '0'}" for m, th in enumerate(idx.zak, start=1)]
            parts.append(f"consistent={'true' if idx.consistent else 'false'}")
            print(", ".join(parts), file=out)
        return EXIT_OK
    raise _Usage("invariants needs a lattice, photonic or schrodinger document")


_MODE_HEADER = ["energy", "center", "decay_length", "boundary_weight"]


def _mode_rows(modes):
    return [(m.energy, m.center, m.decay_length, m.boundary_weight) for m in modes]


def cmd_edge(args, out):
    model = load_document(args.model)
    if not isinstance(model, lattice.HoppingModel):
        raise _Usage("edge needs a lattice document")
    trunc = lattice_interface.build_half_space(model, args.side, args.sites)
    if args.window:
        window = _parse_window(args.window)
        modes = lattice_interface.in_gap_modes(trunc, None, window)
    else:
        _, gap = lattice.band_spectrum(model)
        modes = lattice_interface.in_gap_modes(trunc, gap)
    _write_csv(args.out, _MODE_HEADER, _mode_rows(modes), out)
    if args.spectrum_out:
        w, _ = lattice_interface.eigensolve(trunc)
        _write_csv(args.spectrum_out, ["index", "E"], list(enumerate(w)), out)
    return EXIT_OK


def cmd_interface(args, out):
    spec = load_document(args.model)
    if isinstance(spec, lattice_interface.InterfaceSpec):
        if args.window:
            window = _parse_window(args.window)
        else:
            _, gl = lattice.band_spectrum(spec.left)
            _, gr = lattice.band_spectrum(spec.right)
            window = (max(gl.lower, gr.lower), min(gl.upper, gr.upper))
            if not window[0] < window[1]:
                raise NumericalError("the two bulk gaps do not overlap")
        trunc = lattice_interface.build_interface(spec, args.sites)
        modes = lattice_interface.in_gap_modes(trunc, None, window)
        _write_csv(args.out, _MODE_HEADER, _mode_rows(modes), out)
        return EXIT_OK
    if isinstance(spec, GluedSpec):
        system = glued.glue(spec.left, spec.right, spec.gap_left, spec.gap_right)
        mode = glued.find_interface_mode(system, with_profile=False)
        curve_l = continuum.impedance_curve(spec.left, system.gap, args.e_samples)
        curve_r = continuum.impedance_curve(spec.right, system.gap, args.e_samples)
        rows = [
            (e, xl, xr, xl - xr)
            for e, xl, xr in zip(curve_l.energies, curve_l.xi_left, curve_r.xi_right)
        ]
        _write_csv(args.out, ["E", "xi_L", "xi_R", "xi"], rows, out)
        summary = out if args.out else sys.stderr
        print(f"gap: ({fmt(system.gap[0])}, {fmt(system.gap[1])}), gamma_L={system.gamma_left}, gamma_R={system.gamma_right}", file=summary)
        if mode is None:
            print("E*: none", file=summary)
        else:
            tag = "predicted" if mode.predicted else "not predicted"
            print(f"E*={fmt(mode.energy)} ({tag}), residual={fmt(mode.residual)}", file=summary)
        return EXIT_OK
    raise _Usage("interface needs an interface_lattice or glued_continuum document")


def cmd_dislocate(args, out):
    model = load_document(args.model)
    if isinstance(model, lattice.HoppingModel):
        out.write(dump_document(lattice.half_cell_shift(model)))
        return EXIT_OK
    if isinstance(model, continuum.PeriodicMedium):
        out.write(dump_document(glued.dislocate(model)))
        return EXIT_OK
    raise _Usage("dislocate needs a lattice, photonic or schrodinger document")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="bic1d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bands", help="dispersion samples and gap summary")
    p.add_argument("model")
    p.add_argument("--k-samples", type=_positive_int, default=65)
    p.add_argument("--bands", type=_positive_int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("invariants", help="winding, Zak phase, SNN split or bulk indices")
    p.add_argument("model")
    p.add_argument("--gaps", type=_positive_int, default=2)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("edge", help="in-gap modes of a truncated half-space")
    p.add_argument("model")
    p.add_argument("--sites", type=_positive_int, default=100)
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.add_argument("--window")
    p.add_argument("--out")
    p.add_argument("--spectrum-out")
    p.set_defaults(func=cmd_edge)

    p = sub.add_parser("interface", help="interface modes (lattice) or impedance matching (continuum)")
    p.add_argument("model")
    p.add_argument("--sites", type=_positive_int, default=100)
    p.add_argument("--e-samples", type=_positive_int, default=400)
    p.add_argument("--window")
    p.add_argument("--out")
    p.set_defaults(func=cmd_interface)

    p = sub.add_parser("dislocate", help="half-period shifted model, written as JSON")
    p.add_argument("model")
    p.set_defaults(func=cmd_dislocate)
    return parser


def main(argv=None, stdout=None):
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args, stdout)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ModelError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
