from __future__ import annotations
import math
import warnings
import numpy as np
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union
from ..Physics.chain import (ChainParams, DisorderSpec, WitnessResult, AverageKind, AVERAGE_KINDS, T_MIN, DELTA_MAX, TOL_EPS,
                             WITNESS_BOUND, check_option)
from ..Numerics.quadrature import MIN_GRID, GRID_FACTOR

Engine = Literal['perturbative', 'oracle']
ENGINES = ('perturbative', 'oracle')
MIN_RESOLUTION = 16
DEFAULT_B_RANGE = (0.0, 1.2)
DEFAULT_T_RANGE = (T_MIN, 1.5)

def _axis(values: Sequence[float], name: str) -> np.ndarray:
    axis = np.array(values, dtype=float).ravel()
    if axis.shape[0] < 2:
        raise ValueError(f'{name} axis needs at least two points.')
    if not np.all(np.diff(axis) > 0):
        raise ValueError(f'{name} axis must be strictly ascending.')
    axis.setflags(write=False)
    return axis

class PhaseGrid:
    """Witness values on a rectangular (B, T) grid. Row i holds T_axis[i], column j holds B_axis[j]. Frozen after construction.
    """
    def __init__(self, B_axis: Sequence[float], T_axis: Sequence[float], clean_part: np.ndarray, correction_part: np.ndarray,
                 meta: Dict[str, Any], std_err: Optional[np.ndarray] = None) -> None:
        """Initialising the grid.

        Args:
            B_axis (Sequence[float]): Ascending field axis.
            T_axis (Sequence[float]): Ascending temperature axis.
            clean_part (np.ndarray): Clean signed witness per cell, shape (len(T_axis), len(B_axis)).
            correction_part (np.ndarray): Disorder correction per cell, same shape.
            meta (Dict[str, Any]): Run metadata; must hold "J", "delta", "average" and "engine".
            std_err (Optional[np.ndarray], optional): Statistical error per cell for sampled grids. Defaults to None.
        """
        self._B_axis = _axis(B_axis, 'B')
        self._T_axis = _axis(T_axis, 'T')
        shape = (self._T_axis.shape[0], self._B_axis.shape[0])
        arrays = []
        for name, values in [('clean_part', clean_part), ('correction_part', correction_part),
                             ('std_err', np.zeros(shape) if std_err is None else std_err)]:
            values = np.array(values, dtype=float)
            if values.shape != shape:
                raise ValueError(f'{name} has shape {values.shape}, expected {shape}.')
            if not np.isfinite(values).all():
                raise ValueError(f'{name} has missing or non-finite cells.')
            values.setflags(write=False)
            arrays.append(values)
        self._clean_part, self._correction_part, self._std_err = arrays
        self._signed = self._clean_part + self._correction_part
        self._signed.setflags(write=False)
        missing = list(filter(lambda k: k not in meta, ['J', 'delta', 'average', 'engine']))
        if len(missing) != 0:
            raise ValueError(f'Grid metadata is missing: {", ".join(missing)}.')
        self._meta = dict(meta)
        self._boundary = None

    @property
    def B_axis(self) -> np.ndarray:
        return self._B_axis

    @property
    def T_axis(self) -> np.ndarray:
        return self._T_axis

    @property
    def shape(self) -> Tuple[int, int]:
        return self._signed.shape

    @property
    def meta(self) -> Dict[str, Any]:
        return dict(self._meta)

    @property
    def J(self) -> float:
        return float(self._meta['J'])

    @property
    def signed(self) -> np.ndarray:
        return self._signed

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self._signed)

    @property
    def entangled(self) -> np.ndarray:
        return self.magnitude > WITNESS_BOUND

    @property
    def clean_part(self) -> np.ndarray:
        return self._clean_part

    @property
    def correction_part(self) -> np.ndarray:
        return self._correction_part

    @property
    def std_err(self) -> np.ndarray:
        return self._std_err

    @property
    def boundary(self) -> np.ndarray:
        """W = 1 level-set segments (B0, T0, B1, T1), extracted once.

        Returns:
            np.ndarray: Segments, shape (k, 4).
        """
        from ..Numerics.contours import extract_level_set
        if self._boundary is None:
            self._boundary = extract_level_set(self.magnitude, self.B_axis, self.T_axis, level=WITNESS_BOUND)
        return self._boundary

    def result(self, i: int, j: int) -> WitnessResult:
        """Witness at temperature index i and field index j.

        Returns:
            WitnessResult: Cell value.
        """
        return WitnessResult(self._clean_part[i, j], self._correction_part[i, j], average_kind=self._meta['average'])

    def __repr__(self) -> str:
        return (f'PhaseGrid(shape={self.shape}, J={self.J!r}, delta={self._meta["delta"]!r}, '
                f'average={self._meta["average"]!r}, engine={self._meta["engine"]!r})')

def _resolution(resolution: Union[int, Tuple[int, int]]) -> Tuple[int, int]:
    nB, nT = (resolution, resolution) if isinstance(resolution, (int, np.integer)) else tuple(resolution)
    if min(nB, nT) < MIN_RESOLUTION:
        raise ValueError(f'Resolution must be at least {MIN_RESOLUTION} per axis, got ({nB}, {nT}).')
    return int(nB), int(nT)

def scan(B_range: Tuple[float, float] = DEFAULT_B_RANGE, T_range: Tuple[float, float] = DEFAULT_T_RANGE,
         resolution: Union[int, Tuple[int, int]] = 64, params: Optional[ChainParams] = None, disorder: Optional[DisorderSpec] = None,
         kind: AverageKind = 'quenched', engine: Engine = 'perturbative', sites: int = 256, samples: int = 400,
         seed: Optional[int] = None, n_jobs: int = -1, progress: bool = False, size: Optional[int] = None,
         tol_eps: float = TOL_EPS, t_min: float = T_MIN, delta_max: float = DELTA_MAX, min_grid: int = MIN_GRID,
         grid_factor: float = GRID_FACTOR) -> PhaseGrid:
    """Evaluate the witness over the (B, T) plane.

    Args:
        B_range (Tuple[float, float], optional): Field range. Defaults to (0, 1.2).
        T_range (Tuple[float, float], optional): Temperature range, starting at or above t_min. Defaults to (0.005, 1.5).
        resolution (Union[int, Tuple[int, int]], optional): Points per axis, or (B points, T points), at least 16 each. Defaults to 64.
        params (Optional[ChainParams], optional): Template supplying J; B and T are replaced per cell. Defaults to None (J = 1).
        disorder (Optional[DisorderSpec], optional): Disorder specification. Defaults to None (clean chain).
        kind (AverageKind, optional): Kind of disorder average. Defaults to 'quenched'.
        engine (Engine, optional): "perturbative" (thermodynamic limit) or "oracle" (finite-chain Monte Carlo). Defaults to 'perturbative'.
        sites (int, optional): Chain length for the oracle. Defaults to 256.
        samples (int, optional): Realizations per cell for the oracle. Defaults to 400.
        seed (Optional[int], optional): Seed, mandatory for the oracle. Defaults to None.
        n_jobs (int, optional): Worker threads over cells. Defaults to -1.
        progress (bool, optional): Whether to show a progress bar. Defaults to False.
        size (Optional[int], optional): Quadrature nodes; None scales with temperature. Defaults to None.
        min_grid (int, optional): Smallest temperature-scaled grid. Defaults to 256.
        grid_factor (float, optional): Grid nodes per unit of beta. Defaults to 16.
        tol_eps (float, optional): Patch band half-width. Defaults to TOL_EPS.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.
        delta_max (float, optional): Variance above which a validity warning is issued once. Defaults to DELTA_MAX.

    Returns:
        PhaseGrid: Fully populated grid.
    """
    from ..utils import parallel_map
    from ..Numerics.quadrature import grid_size
    from ..errors import ScanAbortedError, TemperatureTooLowError, PerturbativeValidityWarning
    params = ChainParams() if params is None else params
    disorder = DisorderSpec() if disorder is None else disorder
    kind = check_option(kind, AVERAGE_KINDS, 'Average kind')
    engine = check_option(engine, ENGINES, 'Engine')
    nB, nT = _resolution(resolution)
    if T_range[0] < t_min:
        raise TemperatureTooLowError(f'Scan starts at T={T_range[0]!r}, below T_min={t_min!r}.')
    if (engine == 'oracle') and (seed is None):
        raise ValueError('Oracle scans need an explicit seed.')
    if (engine == 'perturbative') and (disorder.variance > delta_max):
        warnings.warn(f"delta exceeds perturbative validity {np.format_float_scientific(delta_max, trim='-', exp_digits=1)}",
                      PerturbativeValidityWarning, stacklevel=2)
    B_axis = _axis(np.linspace(B_range[0], B_range[1], nB), 'B')
    T_axis = _axis(np.linspace(T_range[0], T_range[1], nT), 'T')

    def evaluate(cell: Tuple[float, float]) -> Tuple[float, float, float]:
        B, T = cell
        point = params.replace(B=B, T=T)
        try:
            if engine == 'perturbative':
                from ..Witness.perturbative import perturbative_witness
                point_size = grid_size(point.beta, min_grid, grid_factor) if size is None else size
                result = perturbative_witness(point, disorder, kind, size=point_size, tol_eps=tol_eps, t_min=t_min, delta_max=math.inf)
                return result.clean_part, result.correction_part, 0.0
            from ..Oracle.free_fermion import oracle_result
            result, estimate = oracle_result(point, disorder, sites, samples, seed, kind, n_jobs=1, t_min=t_min)
            return result.clean_part, result.correction_part, estimate.std_err
        except Exception as e:
            raise ScanAbortedError(B, T, e) from e

    cells = [(B, T) for T in T_axis for B in B_axis]
    results = parallel_map(evaluate, cells, n_jobs=n_jobs, progress=progress, desc='scan')
    values = np.array(results, dtype=float).reshape(nT, nB, 3)
    meta = dict(J=params.J, delta=disorder.variance, channel=disorder.channel, average=kind, engine=engine,
                resolution=[nB, nT], size=size, tol_eps=tol_eps, t_min=t_min)
    if engine == 'oracle':
        meta.update(sites=sites, samples=samples, seed=seed)
    return PhaseGrid(B_axis, T_axis, values[:, :, 0], values[:, :, 1], meta, std_err=values[:, :, 2])

def _edge_fraction(a: np.ndarray, b: np.ndarray, level: float) -> np.ndarray:
    # share of a linearly interpolated edge from a to b lying above level
    above_a = a > level
    above_b = b > level
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(above_a != above_b, (a - level) / (a - b), 0.0)
    return np.where(above_a & above_b, 1.0, np.where(above_a, t, np.where(above_b, 1.0 - t, 0.0)))

def region_area(g: PhaseGrid, level: float = WITNESS_BOUND) -> float:
    """Area of the entangled region {W > level} in the (B, T) plane.

    Each cell contributes its area times the mean entangled share of its four edges, so boundary cells are split
    by linear interpolation.

    Args:
        g (PhaseGrid): Scanned grid.
        level (float, optional): Threshold. Defaults to 1.

    Returns:
        float: Area in units of field times temperature.
    """
    w = g.magnitude
    bottom = _edge_fraction(w[:-1, :-1], w[:-1, 1:], level)
    top = _edge_fraction(w[1:, :-1], w[1:, 1:], level)
    left = _edge_fraction(w[:-1, :-1], w[1:, :-1], level)
    right = _edge_fraction(w[:-1, 1:], w[1:, 1:], level)
    share = 0.25 * (bottom + top + left + right)
    cell_area = np.outer(np.diff(g.T_axis), np.diff(g.B_axis))
    return float(np.sum(share * cell_area))

@dataclass(frozen=True)
class ContainmentReport:
    """Cells entangled in the inner grid but not in the outer one.
    """
    violations: List[Tuple[float, float, float, float]] = field(default_factory=list)

    @property
    def contained(self) -> bool:
        return len(self.violations) == 0

    @property
    def count(self) -> int:
        return len(self.violations)

def _check_comparable(a: PhaseGrid, b: PhaseGrid) -> None:
    from ..errors import AxisMismatchError
    if not (np.array_equal(a.B_axis, b.B_axis) and np.array_equal(a.T_axis, b.T_axis)):
        raise AxisMismatchError('Grids do not share the same (B, T) axes.')
    if a.J != b.J:
        raise AxisMismatchError(f'Grids were scanned at different couplings J={a.J!r} and J={b.J!r}.')

def containment(inner: PhaseGrid, outer: PhaseGrid, tol: float = 1e-9) -> ContainmentReport:
    """Check that every cell entangled in inner is also entangled in outer, up to tol on W.

    Args:
        inner (PhaseGrid): Grid expected to have the smaller entangled region.
        outer (PhaseGrid): Grid expected to have the larger entangled region.
        tol (float, optional): Tolerance on the outer witness. Defaults to 1e-9.

    Returns:
        ContainmentReport: Violations as (B, T, inner W, outer W); empty when contained.
    """
    _check_comparable(inner, outer)
    w_in = inner.magnitude
    w_out = outer.magnitude
    bad = (w_in > WITNESS_BOUND) & ~(w_out > WITNESS_BOUND - tol)
    rows, cols = np.nonzero(bad)
    violations = list(map(lambda rc: (float(inner.B_axis[rc[1]]), float(inner.T_axis[rc[0]]),
                                      float(w_in[rc]), float(w_out[rc])), zip(rows, cols)))
    return ContainmentReport(violations=violations)

@dataclass(frozen=True)
class LobeReport:
    """Outcome of the search for entangled cells in a (B, T) window.
    """
    detected: bool
    max_witness: float
    cells: int

def lobe_detector(g: PhaseGrid, B_window: Optional[Tuple[float, float]] = None, T_window: Optional[Tuple[float, float]] = None) -> LobeReport:
    """Look for entangled cells near the B = J transition at low temperature.

    Args:
        g (PhaseGrid): Scanned grid.
        B_window (Optional[Tuple[float, float]], optional): Field window. Defaults to None, meaning [0.9 J, 1.1 J].
        T_window (Optional[Tuple[float, float]], optional): Temperature window. Defaults to None, meaning [T_min, 0.05 J].

    Returns:
        LobeReport: Whether some cell in the window has W > 1, and the largest W there.
    """
    from ..errors import WindowOutOfRangeError
    J = g.J
    B_lo, B_hi = (0.9 * J, 1.1 * J) if B_window is None else B_window
    T_lo, T_hi = (g.meta.get('t_min', T_MIN), 0.05 * J) if T_window is None else T_window
    slack = 1e-12 * max(1.0, abs(J))
    if (B_lo < g.B_axis[0] - slack) or (B_hi > g.B_axis[-1] + slack) or (T_lo < g.T_axis[0] - slack) or (T_hi > g.T_axis[-1] + slack):
        raise WindowOutOfRangeError(f'Window B in [{B_lo}, {B_hi}], T in [{T_lo}, {T_hi}] is not inside the scanned grid.')
    cols = (g.B_axis >= B_lo - slack) & (g.B_axis <= B_hi + slack)
    rows = (g.T_axis >= T_lo - slack) & (g.T_axis <= T_hi + slack)
    if (not cols.any()) or (not rows.any()):
        raise WindowOutOfRangeError(f'Window B in [{B_lo}, {B_hi}], T in [{T_lo}, {T_hi}] holds no grid point.')
    window = g.magnitude[np.ix_(rows, cols)]
    return LobeReport(detected=bool((window > WITNESS_BOUND).any()), max_witness=float(window.max()), cells=int(window.size))
