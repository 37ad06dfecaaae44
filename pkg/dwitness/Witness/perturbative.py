from __future__ import annotations
import math
import warnings
import numpy as np
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union
from ..Physics.chain import (ChainParams, DisorderSpec, WitnessResult, AverageKind, AVERAGE_KINDS, T_MIN, DELTA_MAX, TOL_EPS,
                             check_option, check_temperature, dispersion, fermi, fermi_derivs)

ArrayLike = Union[float, np.ndarray]
PERTURBATIVE_KINDS = ('quenched', 'annealed')

@dataclass(frozen=True)
class CorrectionKernelContext:
    """Per-q state shared by every inner-integral evaluation of the correction kernel.
    """
    params: ChainParams
    q: ArrayLike
    energy: ArrayLike
    n: ArrayLike
    n1: ArrayLike
    n2: ArrayLike

    @classmethod
    def at(cls, q: ArrayLike, params: ChainParams) -> CorrectionKernelContext:
        """Build the context at momentum q.

        Args:
            q (ArrayLike): Outer momentum, scalar or array.
            params (ChainParams): Chain parameters.

        Returns:
            CorrectionKernelContext: Context with n, n' and n'' evaluated at dispersion(q).
        """
        energy = dispersion(q, params)
        n, n1, n2 = fermi_derivs(energy, params.beta)
        return cls(params=params, q=q, energy=energy, n=n, n1=n1, n2=n2)

def _occupation_difference(e_q: ArrayLike, e_p: ArrayLike, beta: float) -> ArrayLike:
    # n(e_q) - n(e_p) as a product, free of cancellation for close energies
    d = np.asarray(e_p - e_q, dtype=float)
    x = -beta * np.abs(d)
    lower = np.where(d >= 0, e_q, e_p)
    upper = np.where(d >= 0, e_p, e_q)
    factor = fermi(lower, beta) * fermi(-upper, beta) * np.expm1(x)
    return np.where(d >= 0, -factor, factor)

def _bracket(ctx: CorrectionKernelContext, p: ArrayLike) -> ArrayLike:
    beta = ctx.params.beta
    e_p = dispersion(p, ctx.params)
    d = e_p - ctx.energy
    filling = -ctx.n1 / beta
    return _occupation_difference(ctx.energy, e_p, beta) / d ** 2 - beta * filling / d

def kernel_K(q: ArrayLike, p: ArrayLike, ctx: CorrectionKernelContext, tol_eps: float = TOL_EPS) -> ArrayLike:
    """Bracket of the quenched correction, (n(q)-n(p))/(e(p)-e(q))^2 - beta n(q)(1-n(q))/(e(p)-e(q)).

    Args:
        q (ArrayLike): Outer momentum; must match ctx.q.
        p (ArrayLike): Inner momentum.
        ctx (CorrectionKernelContext): Context built at q.
        tol_eps (float, optional): Half-width of the band around e(p) = e(q) where the kernel must not be evaluated. Defaults to TOL_EPS.

    Returns:
        ArrayLike: Kernel value.
    """
    from ..errors import KernelBandError
    if not np.array_equal(np.asarray(q), np.asarray(ctx.q)):
        raise ValueError('Kernel context was built for a different outer momentum.')
    d = dispersion(p, ctx.params) - ctx.energy
    if np.any(np.abs(d) <= tol_eps):
        raise KernelBandError(f'Kernel evaluated inside the band |e(p) - e(q)| <= {tol_eps}; use kernel_limit there.')
    return _bracket(ctx, p)

def kernel_limit(q: ArrayLike, ctx: CorrectionKernelContext) -> ArrayLike:
    """Removable-singularity limit of the kernel as e(p) -> e(q), -n''(e(q))/2.

    Args:
        q (ArrayLike): Outer momentum.
        ctx (CorrectionKernelContext): Context built at q.

    Returns:
        ArrayLike: Limit value.
    """
    return -0.5 * ctx.n2

def _grid(params: ChainParams, size: Optional[int]) -> int:
    from ..Numerics.quadrature import grid_size
    return grid_size(params.beta) if size is None else int(size)

def _quenched_integrals(q: np.ndarray, params: ChainParams, size: int, tol_eps: float) -> np.ndarray:
    from ..Numerics.quadrature import QuadratureGrid, inner_integral_patched
    inner = QuadratureGrid(size, shifted=True)
    values = inner_integral_patched(q, lambda qc, p: _bracket(CorrectionKernelContext.at(qc, params), p),
                                    lambda qc: kernel_limit(qc, CorrectionKernelContext.at(qc, params)),
                                    inner, tol_eps, energy=lambda x: dispersion(x, params),
                                    weight=lambda qc, p: np.cos(0.5 * (qc + p)) ** 2)
    return 2.0 / math.pi * values

def G_quenched(q: ArrayLike, params: ChainParams, size: Optional[int] = None, tol_eps: float = TOL_EPS, t_min: float = T_MIN) -> ArrayLike:
    """First-order quenched correction function G_q(q) = (2/pi) int dp cos^2((q+p)/2) K(q, p).

    Args:
        q (ArrayLike): Momentum, scalar or array.
        params (ChainParams): Chain parameters.
        size (Optional[int], optional): Nodes of the inner grid. Defaults to None.
        tol_eps (float, optional): Patch band half-width. Defaults to TOL_EPS.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        ArrayLike: G_q at each momentum.
    """
    check_temperature(params, t_min)
    values = _quenched_integrals(np.asarray(q, dtype=float), params, _grid(params, size), tol_eps)
    return float(values) if np.ndim(q) == 0 else values

@lru_cache(maxsize=256)
def first_moment(params: ChainParams, size: int) -> float:
    """Occupation moment I_1 = int dp n(p) cos p, cached per parameters and grid.

    Args:
        params (ChainParams): Chain parameters.
        size (int): Quadrature nodes.

    Returns:
        float: I_1, equal to pi/2 times the clean signed witness.
    """
    from ..Numerics.quadrature import periodic_integral
    return periodic_integral(lambda p: fermi(dispersion(p, params), params.beta) * np.cos(p), size)

def annealed_extra(q: ArrayLike, params: ChainParams, size: Optional[int] = None) -> ArrayLike:
    """Separable annealed term, -(2 beta^2/pi) n(q)(1-n(q)) cos q I_1, added to G_q to give G_a.

    Args:
        q (ArrayLike): Momentum.
        params (ChainParams): Chain parameters.
        size (Optional[int], optional): Nodes used for I_1. Defaults to None.

    Returns:
        ArrayLike: Extra term.
    """
    beta = params.beta
    n = fermi(dispersion(q, params), beta)
    moment = first_moment(params, _grid(params, size))
    return -2.0 * beta ** 2 / math.pi * n * (1.0 - n) * np.cos(q) * moment

def G_annealed(q: ArrayLike, params: ChainParams, size: Optional[int] = None, tol_eps: float = TOL_EPS, t_min: float = T_MIN) -> ArrayLike:
    """First-order annealed correction function G_a(q) = G_q(q) + annealed_extra(q).

    Args:
        q (ArrayLike): Momentum, scalar or array.
        params (ChainParams): Chain parameters.
        size (Optional[int], optional): Quadrature nodes. Defaults to None.
        tol_eps (float, optional): Patch band half-width. Defaults to TOL_EPS.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        ArrayLike: G_a at each momentum.
    """
    values = G_quenched(q, params, size=size, tol_eps=tol_eps, t_min=t_min) + annealed_extra(q, params, size=size)
    return float(values) if np.ndim(q) == 0 else values

@lru_cache(maxsize=4096)
def correction_slope(params: ChainParams, kind: AverageKind = 'quenched', size: Optional[int] = None,
                     tol_eps: float = TOL_EPS, t_min: float = T_MIN) -> float:
    """Witness change per unit variance, -(2/pi) int dq cos q G(q).

    Args:
        params (ChainParams): Chain parameters.
        kind (AverageKind, optional): "quenched" or "annealed". Defaults to 'quenched'.
        size (Optional[int], optional): Nodes of both grids. Defaults to None.
        tol_eps (float, optional): Patch band half-width. Defaults to TOL_EPS.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        float: Slope of the signed witness in the variance.
    """
    from ..Numerics.quadrature import double_integral_patched
    kind = check_option(kind, PERTURBATIVE_KINDS, 'Average kind')
    check_temperature(params, t_min)
    size = _grid(params, size)
    result = double_integral_patched(lambda qc, p: _bracket(CorrectionKernelContext.at(qc, params), p),
                                     lambda qc: kernel_limit(qc, CorrectionKernelContext.at(qc, params)),
                                     size, size, tol_eps, energy=lambda x: dispersion(x, params),
                                     weight=lambda qc, p: np.cos(qc) * np.cos(0.5 * (qc + p)) ** 2)
    slope = -4.0 / math.pi ** 2 * result.total
    if kind == 'annealed':
        q = result.outer.points
        slope -= 2.0 / math.pi * result.outer.integrate(np.cos(q) * annealed_extra(q, params, size=size))
    return slope

def perturbative_witness(params: ChainParams, disorder: DisorderSpec, kind: AverageKind = 'quenched', size: Optional[int] = None,
                         tol_eps: float = TOL_EPS, t_min: float = T_MIN, delta_max: float = DELTA_MAX) -> WitnessResult:
    """Disorder-averaged witness to first order in the variance, in the thermodynamic limit.

    Args:
        params (ChainParams): Chain parameters.
        disorder (DisorderSpec): Disorder on the coupling channel.
        kind (AverageKind, optional): "quenched" or "annealed"; "none" only for zero variance. Defaults to 'quenched'.
        size (Optional[int], optional): Quadrature nodes. Defaults to None.
        tol_eps (float, optional): Patch band half-width. Defaults to TOL_EPS.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.
        delta_max (float, optional): Variance above which a validity warning is issued. Defaults to DELTA_MAX.

    Returns:
        WitnessResult: Clean part, correction part and their sum.
    """
    from .clean import clean_signed_witness
    from ..errors import FieldChannelUnsupportedError, PerturbativeValidityWarning
    kind = check_option(kind, AVERAGE_KINDS, 'Average kind')
    if disorder.channel == 'field':
        raise FieldChannelUnsupportedError('No first-order formula exists for random-field disorder; use the oracle engine.')
    if (kind == 'none') and (disorder.variance > 0):
        raise ValueError('Average kind "none" requires zero disorder variance.')
    check_temperature(params, t_min)
    if disorder.variance > delta_max:
        warnings.warn(f"delta exceeds perturbative validity {np.format_float_scientific(delta_max, trim='-', exp_digits=1)}", PerturbativeValidityWarning, stacklevel=2)
    size = _grid(params, size)
    clean = clean_signed_witness(params, 'n', size=size, t_min=t_min)
    correction = 0.0
    if disorder.variance > 0:
        correction = disorder.variance * correction_slope(params, kind, size, tol_eps, t_min)
    return WitnessResult(clean, correction, average_kind=kind)
