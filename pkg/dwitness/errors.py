from typing import Any, Optional, Tuple

class DisorderWitnessError(ValueError):
    """Base class for all numerical-domain errors raised by dwitness.
    """

class NonFiniteIntegrandError(DisorderWitnessError):
    """Raised when an integrand returns a non-finite value at a quadrature node.
    """
    def __init__(self, node: float, value: Any) -> None:
        """Initialising the error.

        Args:
            node (float): Quadrature node where the integrand is not finite.
            value (Any): Offending value.
        """
        self.node = float(node)
        self.value = value
        super().__init__(f'Integrand is not finite at q={self.node!r} (value {value!r}).')

class SingularKernelError(DisorderWitnessError):
    """Raised when a double-integral kernel is not finite outside the patch band.
    """
    def __init__(self, q: float, p: float) -> None:
        """Initialising the error.

        Args:
            q (float): Outer momentum.
            p (float): Inner momentum.
        """
        self.q = float(q)
        self.p = float(p)
        super().__init__(f'Kernel is not finite at (q, p)=({self.q!r}, {self.p!r}) outside the patch band.')

class KernelBandError(DisorderWitnessError):
    """Raised when the raw correction kernel is evaluated inside the tolerance band.
    """

class EigenConvergenceError(DisorderWitnessError):
    """Raised when the eigensolver does not converge.
    """

class EmptyInputError(DisorderWitnessError):
    """Raised on empty input sequences.
    """

class GridTooSmallError(DisorderWitnessError):
    """Raised when a grid is smaller than 2x2.
    """

class FieldChannelUnsupportedError(DisorderWitnessError):
    """Raised when the perturbative engine is asked for random-field disorder.
    """

class TemperatureTooLowError(DisorderWitnessError):
    """Raised when the temperature is below the quadrature floor T_min.
    """

class DegenerateWeightsError(DisorderWitnessError):
    """Raised when a single annealed weight dominates the sample.
    """

class SizeCapError(DisorderWitnessError):
    """Raised when the dense exact diagonalisation is asked for too many sites.
    """

class WindowOutOfRangeError(DisorderWitnessError):
    """Raised when a detection window is not contained in the scanned grid.
    """

class AxisMismatchError(DisorderWitnessError):
    """Raised when two phase grids cannot be compared cell by cell.
    """

class ScanAbortedError(DisorderWitnessError):
    """Raised when a grid point fails, carrying the failing coordinates.
    """
    def __init__(self, B: float, T: float, cause: Optional[BaseException] = None) -> None:
        """Initialising the error.

        Args:
            B (float): Magnetic field of the failing point.
            T (float): Temperature of the failing point.
            cause (Optional[BaseException], optional): Underlying engine error. Defaults to None.
        """
        self.B = float(B)
        self.T = float(T)
        self.cause = cause
        reason = f' {type(cause).__name__}: {cause}' if cause is not None else ''
        super().__init__(f'Scan aborted at (B, T)=({self.B!r}, {self.T!r}).{reason}')

    @property
    def coordinates(self) -> Tuple[float, float]:
        """Coordinates of the failing point.

        Returns:
            Tuple[float, float]: (B, T).
        """
        return self.B, self.T

class PerturbativeValidityWarning(UserWarning):
    """Warning issued when the disorder variance exceeds the perturbative range.
    """

class EffectiveSampleWarning(UserWarning):
    """Warning issued when annealed weights leave fewer than half the samples effective.
    """
