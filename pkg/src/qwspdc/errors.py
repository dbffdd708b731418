"""Exception hierarchy shared by every module in the package."""


class QWalkError(Exception):
    """Base class for all errors raised by qwspdc."""


class GapClosure(QWalkError):
    """The two bands touch (|sin E| below tolerance); the Bloch vector is undefined."""

    def __init__(self, k: float, energy: float, tol: float):
        self.k = float(k)
        self.energy = float(energy)
        self.tol = tol
        super().__init__(
            f"band gap closes at k={self.k:.17g} (E={self.energy:.17g}, |sin E| <= {tol:g})"
        )


class PhaseUndefined(QWalkError):
    """Both planar Bloch-vector numerators vanish, so the relative phase has no direction."""

    def __init__(self, k: float):
        self.k = float(k)
        super().__init__(f"relative phase undefined at k={self.k:.17g}")


class DegenerateOverlap(QWalkError):
    """Neighbouring eigenvectors on the k-grid are (nearly) orthogonal."""


class NonQuantized(QWalkError):
    """The winding estimate is not close to an integer."""


class GridDegenerate(QWalkError):
    """Too many cells of a coupling grid could not be evaluated."""


class InvalidGrid(QWalkError):
    """A grid containing invalid cells was passed where a complete grid is required."""


class EdgeOverflow(QWalkError):
    """The walker's support would reach the edge of the finite lattice."""


class InsufficientData(QWalkError):
    """Not enough usable samples to fit a scaling law."""
