"""Exception hierarchy shared by the whole package."""


class LatticeWignerError(Exception):
    """Base class for every error raised by latticewigner."""


class StateError(LatticeWignerError, ValueError):
    """A state, density operator or state description failed validation."""


class NyquistError(LatticeWignerError, ValueError):
    """The momentum-like sampling is too coarse for exact quadrature."""


class AxisMismatchError(LatticeWignerError, ValueError):
    """Two grids do not share axes or spacing."""


class ImaginaryResidueError(LatticeWignerError, ArithmeticError):
    """A quantity that must be real came out with a sizeable imaginary part."""


class ThetaConvergenceError(LatticeWignerError, ArithmeticError):
    """The theta series would need more terms than the hard cap allows."""
