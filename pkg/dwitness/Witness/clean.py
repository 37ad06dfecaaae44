from __future__ import annotations
import math
import numpy as np
from dataclasses import dataclass
from typing import Literal, Optional
from ..Physics.chain import ChainParams, WitnessResult, T_MIN, check_option, check_temperature, dispersion, fermi

WitnessForm = Literal['n', 'tanh']
WITNESS_FORMS = ('n', 'tanh')

def _size(params: ChainParams, size: Optional[int]) -> int:
    from ..Numerics.quadrature import grid_size
    return grid_size(params.beta) if size is None else int(size)

def lnZ0_density(params: ChainParams, size: Optional[int] = None, t_min: float = T_MIN) -> float:
    """Free-energy density of the clean chain, ln Z_0 / N = (1/2pi) int dq ln(2 cosh(beta (J cos q - B))).

    Args:
        params (ChainParams): Chain parameters.
        size (Optional[int], optional): Quadrature nodes. If None, the temperature-scaled default is used. Defaults to None.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        float: ln Z_0 per site.
    """
    from ..Numerics.quadrature import periodic_integral
    check_temperature(params, t_min)
    beta = params.beta
    def integrand(q: np.ndarray) -> np.ndarray:
        x = beta * (params.J * np.cos(q) - params.B)
        return np.logaddexp(x, -x)
    return periodic_integral(integrand, _size(params, size)) / (2.0 * math.pi)

def clean_signed_witness(params: ChainParams, form: WitnessForm = 'n', size: Optional[int] = None, t_min: float = T_MIN) -> float:
    """Signed witness of the clean chain in the thermodynamic limit.

    The occupation form is (2/pi) int dq cos q n(q); the susceptibility form is (1/pi) int dq cos q tanh(beta (J cos q - B)).
    The two are negatives of each other.

    Args:
        params (ChainParams): Chain parameters.
        form (WitnessForm, optional): "n" for the occupation form, "tanh" for the susceptibility form. Defaults to 'n'.
        size (Optional[int], optional): Quadrature nodes. Defaults to None.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        float: Signed witness.
    """
    from ..Numerics.quadrature import periodic_integral
    form = check_option(form, WITNESS_FORMS, 'Witness form')
    check_temperature(params, t_min)
    size = _size(params, size)
    if form == 'n':
        value = periodic_integral(lambda q: np.cos(q) * fermi(dispersion(q, params), params.beta), size)
        return 2.0 * value / math.pi
    value = periodic_integral(lambda q: np.cos(q) * np.tanh(params.beta * (params.J * np.cos(q) - params.B)), size)
    return value / math.pi

def clean_witness(params: ChainParams, size: Optional[int] = None, t_min: float = T_MIN) -> WitnessResult:
    """Witness of the clean chain, built from the occupation form.

    Args:
        params (ChainParams): Chain parameters.
        size (Optional[int], optional): Quadrature nodes. Defaults to None.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        WitnessResult: Result with a zero correction part.
    """
    return WitnessResult(clean_signed_witness(params, 'n', size=size, t_min=t_min), 0.0, average_kind='none')

@dataclass(frozen=True)
class CleanWitnessForms:
    """Both derivations of the clean witness at one point.
    """
    n_form: float
    tanh_form: float

    @property
    def mismatch(self) -> float:
        """Deviation from the exact relation n_form = -tanh_form.

        Returns:
            float: |n_form + tanh_form|.
        """
        return abs(self.n_form + self.tanh_form)

def clean_witness_forms(params: ChainParams, size: Optional[int] = None, t_min: float = T_MIN) -> CleanWitnessForms:
    return CleanWitnessForms(n_form=clean_signed_witness(params, 'n', size=size, t_min=t_min),
                             tanh_form=clean_signed_witness(params, 'tanh', size=size, t_min=t_min))

def lnZ0_coupling_derivative(params: ChainParams, step: float = 1e-6, size: Optional[int] = None, t_min: float = T_MIN) -> float:
    """Thermodynamic witness 2/beta * d(ln Z_0/N)/dJ from a centred difference of lnZ0_density.

    Args:
        params (ChainParams): Chain parameters.
        step (float, optional): Finite-difference step in J. Defaults to 1e-6.
        size (Optional[int], optional): Quadrature nodes, shared by both evaluations. Defaults to None.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        float: Finite-difference witness, comparable to the "tanh" form.
    """
    size = _size(params, size)
    upper = lnZ0_density(params.replace(J=params.J + step), size=size, t_min=t_min)
    lower = lnZ0_density(params.replace(J=params.J - step), size=size, t_min=t_min)
    return 2.0 / params.beta * (upper - lower) / (2.0 * step)

def zeroT_clean_witness(B: float, J: float) -> float:
    """Closed-form clean witness magnitude at zero temperature, (4/pi) sqrt(1 - (B/J)^2) inside the Fermi sea and 0 beyond.

    Args:
        B (float): Magnetic field.
        J (float): Coupling strength, positive.

    Returns:
        float: Witness magnitude.
    """
    if J <= 0:
        raise ValueError(f'Coupling J must be positive, got {J}.')
    ratio = B / J
    if abs(ratio) >= 1.0:
        return 0.0
    return 4.0 / math.pi * math.sqrt(1.0 - ratio * ratio)

def zeroT_critical_field(J: float) -> float:
    """Field at which the zero-temperature clean witness equals the separable bound 1, J sqrt(1 - pi^2/16).

    Args:
        J (float): Coupling strength, positive.

    Returns:
        float: Critical field.
    """
    if J <= 0:
        raise ValueError(f'Coupling J must be positive, got {J}.')
    return J * math.sqrt(1.0 - math.pi ** 2 / 16.0)
