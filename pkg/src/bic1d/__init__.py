"""Topological invariants and interface modes of 1D inversion-symmetric systems.

Lattice side: two-band hopping models, winding numbers, quantized Zak phases,
half-space and interface truncations. Continuum side: piecewise-constant
periodic media, band edges and their parities, impedance matching at a
junction of two media.
"""

from .continuum import (
    PeriodicMedium,
    band_structure,
    bulk_index,
    edge_parity,
    impedance,
    monodromy_discriminant,
    transfer,
)
from .errors import (
    BracketingError,
    ClassificationError,
    GapClosedError,
    ModelError,
    NumericalError,
    SymmetryError,
)
from .glued import common_gap, dislocate, find_interface_mode, glue, mode_profile
from .lattice import (
    HoppingModel,
    band_spectrum,
    half_cell_shift,
    snn_decompose,
    winding_number,
    zak_phase,
)
from .lattice_interface import (
    InterfaceSpec,
    build_half_space,
    build_interface,
    chiral_index,
    in_gap_modes,
    verify_ssh,
)

__version__ = "0.1.0"
