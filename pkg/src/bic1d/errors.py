"""Exception hierarchy shared by the lattice and continuum solvers."""


class ModelError(ValueError):
    """Input data violates a model invariant (symmetry, positivity, shape)."""


class SymmetryError(ModelError):
    """A required symmetry (P, T, chiral, inversion) is absent."""


class NumericalError(RuntimeError):
    """A computation could not produce a trustworthy answer."""


class GapClosedError(NumericalError):
    """The spectral gap needed by the computation is closed or too small."""


class BracketingError(NumericalError):
    """A root could not be bracketed in the scanned energy interval."""


class ClassificationError(NumericalError):
    """A parity or Floquet classification is ambiguous."""
