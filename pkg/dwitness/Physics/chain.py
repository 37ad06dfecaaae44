from __future__ import annotations
import math
import numpy as np
from scipy.special import expit
from typing import Literal, Optional, Tuple, Dict, Any, Union

ArrayLike = Union[float, np.ndarray]
AverageKind = Literal['quenched', 'annealed', 'none']
Channel = Literal['coupling', 'field']

AVERAGE_KINDS = ('quenched', 'annealed', 'none')
CHANNELS = ('coupling', 'field')

T_MIN = 5e-3
DELTA_MAX = 1e-4
TOL_EPS = 1e-6
WITNESS_BOUND = 1.0

def check_option(value: str, options: Tuple[str, ...], name: str) -> str:
    """Validate a string option against its allowed values.

    Args:
        value (str): Value to check.
        options (Tuple[str, ...]): Allowed values.
        name (str): Name of the option, used in the error message.

    Returns:
        str: The value, lower-cased.
    """
    value = str(value).lower()
    if value not in options:
        raise ValueError(f'{name} "{value}" not supported. Choose from {", ".join(options)}.')
    return value

class ChainParams:
    """Physical parameters of the XX chain, in units with k_B = hbar = 1.
    """
    def __init__(self, J: float = 1.0, B: float = 0.0, T: float = 1.0) -> None:
        """Initialising the parameters.

        Args:
            J (float, optional): Nearest-neighbour coupling strength. Defaults to 1.0.
            B (float, optional): Uniform magnetic field. Defaults to 0.0.
            T (float, optional): Temperature, must be positive. Defaults to 1.0.
        """
        J, B, T = float(J), float(B), float(T)
        if not math.isfinite(J):
            raise ValueError(f'Coupling J must be finite, got {J}.')
        if not math.isfinite(B):
            raise ValueError(f'Field B must be finite, got {B}.')
        if (not math.isfinite(T)) or (T <= 0):
            raise ValueError(f'Temperature T must be positive and finite, got {T}.')
        self._J = J
        self._B = B
        self._T = T
        self._beta = 1.0 / T

    @property
    def J(self) -> float:
        """Coupling strength.

        Returns:
            float: Coupling strength.
        """
        return self._J

    @property
    def B(self) -> float:
        """Uniform magnetic field.

        Returns:
            float: Uniform magnetic field.
        """
        return self._B

    @property
    def T(self) -> float:
        """Temperature.

        Returns:
            float: Temperature.
        """
        return self._T

    @property
    def beta(self) -> float:
        """Inverse temperature, derived once at construction.

        Returns:
            float: Inverse temperature.
        """
        return self._beta

    @property
    def key(self) -> Tuple[float, float, float]:
        """Hashable identity of the parameters.

        Returns:
            Tuple[float, float, float]: (J, B, T).
        """
        return (self.J, self.B, self.T)

    def replace(self, **kwargs: float) -> ChainParams:
        """Copy of the parameters with some fields replaced.

        Returns:
            ChainParams: New parameters.
        """
        values = dict(J=self.J, B=self.B, T=self.T)
        values.update(kwargs)
        return ChainParams(**values)

    def to_dict(self) -> Dict[str, float]:
        return dict(J=self.J, B=self.B, T=self.T)

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, ChainParams) and (self.key == other.key)

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f'ChainParams(J={self.J!r}, B={self.B!r}, T={self.T!r})'

class DisorderSpec:
    """Gaussian disorder with zero mean on one channel of the chain.
    """
    def __init__(self, channel: Channel = 'coupling', variance: float = 0.0) -> None:
        """Initialising the disorder specification.

        Args:
            channel (Channel, optional): Random couplings j_l ("coupling") or random fields b_l ("field"). Defaults to 'coupling'.
            variance (float, optional): Variance of the Gaussian distribution. Defaults to 0.0.
        """
        variance = float(variance)
        if (not math.isfinite(variance)) or (variance < 0):
            raise ValueError(f'Disorder variance must be non-negative, got {variance}.')
        self._channel = check_option(channel, CHANNELS, 'Disorder channel')
        self._variance = variance

    @property
    def channel(self) -> str:
        """Disorder channel.

        Returns:
            str: "coupling" or "field".
        """
        return self._channel

    @property
    def variance(self) -> float:
        """Variance of the disorder distribution.

        Returns:
            float: Variance.
        """
        return self._variance

    @property
    def mean(self) -> float:
        return 0.0

    @property
    def perturbative_valid(self) -> bool:
        """Whether the variance lies in the range where first order perturbation theory holds.

        Returns:
            bool: True if variance <= 1e-4.
        """
        return self.variance <= DELTA_MAX

    def with_variance(self, variance: float) -> DisorderSpec:
        return DisorderSpec(channel=self.channel, variance=variance)

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, DisorderSpec) and ((self.channel, self.variance) == (other.channel, other.variance))

    def __hash__(self) -> int:
        return hash((self.channel, self.variance))

    def __repr__(self) -> str:
        return f'DisorderSpec(channel={self.channel!r}, variance={self.variance!r})'

class WitnessResult:
    """Disorder-averaged witness value with its clean and correction parts.
    """
    def __init__(self, clean_part: float, correction_part: float = 0.0, average_kind: AverageKind = 'none',
                 signed: Optional[float] = None, magnitude: Optional[float] = None) -> None:
        """Initialising the result. The signed value is the sum of the two parts; the magnitude is its absolute value.

        Args:
            clean_part (float): Witness of the clean chain, before the absolute value.
            correction_part (float, optional): Disorder correction, before the absolute value. Defaults to 0.0.
            average_kind (AverageKind, optional): Kind of disorder average. Defaults to 'none'.
            signed (Optional[float], optional): Signed value; must equal clean_part + correction_part if given. Defaults to None.
            magnitude (Optional[float], optional): Magnitude; must equal abs(signed) exactly if given. Defaults to None.
        """
        self._clean_part = float(clean_part)
        self._correction_part = float(correction_part)
        total = self._clean_part + self._correction_part
        if (signed is not None) and (float(signed) != total):
            raise ValueError(f'Signed witness {signed!r} does not equal clean + correction = {total!r}.')
        if (magnitude is not None) and (float(magnitude) != abs(total)):
            raise ValueError(f'Witness magnitude {magnitude!r} does not equal |signed| = {abs(total)!r}.')
        self._signed = total
        self._magnitude = abs(total)
        self._average_kind = check_option(average_kind, AVERAGE_KINDS, 'Average kind')

    @property
    def signed(self) -> float:
        """Witness before the outer absolute value.

        Returns:
            float: Signed witness.
        """
        return self._signed

    @property
    def magnitude(self) -> float:
        """Witness W = |signed|.

        Returns:
            float: Witness magnitude.
        """
        return self._magnitude

    @property
    def clean_part(self) -> float:
        return self._clean_part

    @property
    def correction_part(self) -> float:
        return self._correction_part

    @property
    def average_kind(self) -> str:
        return self._average_kind

    @property
    def entangled(self) -> bool:
        """Whether the witness detects entanglement (W > 1).

        Returns:
            bool: True if entangled.
        """
        return self.magnitude > WITNESS_BOUND

    def to_dict(self) -> Dict[str, Any]:
        """Dictionary form of the result.

        Returns:
            Dict[str, Any]: Result fields.
        """
        return dict(signed=self.signed, magnitude=self.magnitude, clean_part=self.clean_part,
                    correction_part=self.correction_part, entangled=self.entangled, average_kind=self.average_kind)

    def __repr__(self) -> str:
        return (f'WitnessResult(signed={self.signed!r}, magnitude={self.magnitude!r}, '
                f'entangled={self.entangled!r}, average_kind={self.average_kind!r})')

def check_temperature(params: ChainParams, t_min: float = T_MIN) -> None:
    """Refuse temperatures below the quadrature floor.

    Args:
        params (ChainParams): Chain parameters.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.
    """
    from ..errors import TemperatureTooLowError
    if params.T < t_min:
        raise TemperatureTooLowError(f'Temperature {params.T!r} is below T_min={t_min!r}; the Fermi step is narrower than the quadrature grid can resolve.')

def dispersion(q: ArrayLike, params: ChainParams) -> ArrayLike:
    """Single-fermion energy of the clean chain, 2J cos q - 2B.

    Args:
        q (ArrayLike): Momentum in [-pi, pi].
        params (ChainParams): Chain parameters.

    Returns:
        ArrayLike: Energy.
    """
    return 2.0 * params.J * np.cos(q) - 2.0 * params.B

def fermi(energy: ArrayLike, beta: float) -> ArrayLike:
    """Fermi occupation 1/(exp(beta*energy) + 1), overflow-free for any beta*energy.

    Args:
        energy (ArrayLike): Energy.
        beta (float): Inverse temperature.

    Returns:
        ArrayLike: Occupation in [0, 1].
    """
    return expit(-beta * np.asarray(energy, dtype=float))

def fermi_derivs(energy: ArrayLike, beta: float) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Fermi occupation and its first two energy derivatives.

    Args:
        energy (ArrayLike): Energy.
        beta (float): Inverse temperature.

    Returns:
        Tuple[ArrayLike, ArrayLike, ArrayLike]: (n, n', n'') with n' = -beta n (1-n) and n'' = beta^2 n (1-n) (1-2n).
    """
    x = beta * np.asarray(energy, dtype=float)
    n = expit(-x)
    hole = expit(x)
    n1 = -beta * n * hole
    n2 = beta ** 2 * n * hole * (hole - n)
    return n, n1, n2

def fermi_third_derivative(energy: ArrayLike, beta: float) -> ArrayLike:
    """Third energy derivative of the Fermi occupation, -beta^3 n (1-n) (1 - 6n + 6n^2).

    Args:
        energy (ArrayLike): Energy.
        beta (float): Inverse temperature.

    Returns:
        ArrayLike: n'''.
    """
    x = beta * np.asarray(energy, dtype=float)
    n = expit(-x)
    hole = expit(x)
    return -beta ** 3 * n * hole * (1.0 - 6.0 * n * hole)
