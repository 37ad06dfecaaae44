from __future__ import annotations
import math
import numpy as np
from dataclasses import dataclass
from typing import Callable, Optional, Union

MIN_NODES = 8
MIN_GRID = 256
GRID_FACTOR = 16
CHUNK_ELEMENTS = 1 << 20

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]

def grid_size(beta: float, min_grid: int = MIN_GRID, grid_factor: float = GRID_FACTOR) -> int:
    """Number of quadrature nodes needed to resolve a Fermi step of width ~T.

    Args:
        beta (float): Inverse temperature.
        min_grid (int, optional): Smallest grid. Defaults to 256.
        grid_factor (float, optional): Nodes per unit of beta. Defaults to 16.

    Returns:
        int: max(min_grid, ceil(grid_factor * beta)).
    """
    return max(int(min_grid), int(math.ceil(grid_factor * beta)))

class QuadratureGrid:
    """Uniform periodic grid on [-pi, pi) with equal weights 2*pi/M.

    The default grid holds the midpoints -pi + (i + 1/2) h, so neither endpoint is a node.
    The shifted grid is offset by half a step (nodes -pi + i h); pairing a midpoint grid
    with a shifted grid of the same size keeps p = q and p = -q off the node pairs.
    """
    def __init__(self, size: int, shifted: bool = False) -> None:
        """Initialising the grid.

        Args:
            size (int): Number of nodes, at least 8.
            shifted (bool, optional): Whether to offset the nodes by half a step. Defaults to False.
        """
        size = int(size)
        if size < MIN_NODES:
            raise ValueError(f'Quadrature grid needs at least {MIN_NODES} nodes, got {size}.')
        self._size = size
        self._shifted = shifted
        self._step = 2.0 * math.pi / size
        offset = 0.0 if shifted else 0.5
        self._points = -math.pi + (np.arange(size) + offset) * self._step
        self._points.setflags(write=False)

    @property
    def size(self) -> int:
        return self._size

    @property
    def shifted(self) -> bool:
        return self._shifted

    @property
    def step(self) -> float:
        """Node spacing, also the uniform weight.

        Returns:
            float: 2*pi/M.
        """
        return self._step

    @property
    def points(self) -> np.ndarray:
        """Quadrature nodes.

        Returns:
            np.ndarray: Nodes, read-only.
        """
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, self.step)

    def integrate(self, values: np.ndarray) -> float:
        """Apply the quadrature to integrand values sampled at the nodes.

        Args:
            values (np.ndarray): Integrand values, last axis over the nodes.

        Returns:
            float: Integral estimate.
        """
        return float(np.sum(values, axis=-1) * self.step)

    def __repr__(self) -> str:
        return f'QuadratureGrid(size={self.size}, shifted={self.shifted})'

def periodic_integral(f: Callable[[np.ndarray], np.ndarray], size: int) -> float:
    """Midpoint-rule integral of a periodic function over [-pi, pi].

    Args:
        f (Callable[[np.ndarray], np.ndarray]): Vectorised integrand.
        size (int): Number of nodes.

    Returns:
        float: Integral estimate, spectrally accurate for smooth periodic integrands.
    """
    from ..errors import NonFiniteIntegrandError
    grid = QuadratureGrid(size)
    values = np.broadcast_to(np.asarray(f(grid.points), dtype=float), grid.points.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteIntegrandError(grid.points[i], values[i])
    return grid.integrate(values)

@dataclass(frozen=True)
class PatchedIntegral:
    """Result of a patched double integral: inner integrals at every outer node and the outer integral of them.
    """
    outer: QuadratureGrid
    inner_values: np.ndarray
    total: float

def inner_integral_patched(q: Union[float, np.ndarray], kernel: Kernel, limit: Callable[[np.ndarray], np.ndarray],
                           inner: QuadratureGrid, tol_eps: float, energy: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                           weight: Optional[Kernel] = None) -> np.ndarray:
    """Inner integral over p of weight(q,p) * kernel(q,p), with the kernel replaced by limit(q) wherever |energy(p) - energy(q)| <= tol_eps.

    Args:
        q (Union[float, np.ndarray]): Outer momenta.
        kernel (Kernel): Vectorised kernel K(q, p), called with q of shape (rows, 1) and p of shape (1, M).
        limit (Callable[[np.ndarray], np.ndarray]): On-diagonal limit of the kernel, called with q of shape (rows, 1).
        inner (QuadratureGrid): Grid for p.
        tol_eps (float): Half-width of the energy band routed to the limit.
        energy (Optional[Callable[[np.ndarray], np.ndarray]], optional): Energy used to locate the band. If None, no node is patched. Defaults to None.
        weight (Optional[Kernel], optional): Smooth factor multiplying the patched kernel. Defaults to None.

    Returns:
        np.ndarray: Inner integral for each q, same shape as q.
    """
    from ..errors import SingularKernelError
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    flat = q_arr.ravel()
    p = inner.points[None, :]
    e_p = energy(p) if energy is not None else None
    rows = max(1, CHUNK_ELEMENTS // inner.size)
    out = np.empty(flat.shape[0])
    for start in range(0, flat.shape[0], rows):
        qc = flat[start:start + rows, None]
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            values = np.asarray(kernel(qc, p), dtype=float)
            values = np.broadcast_to(values, (qc.shape[0], inner.size)).copy()
            if e_p is not None:
                band = np.abs(e_p - energy(qc)) <= tol_eps
                if band.any():
                    lim = np.broadcast_to(np.asarray(limit(qc), dtype=float), (qc.shape[0], 1))
                    values = np.where(band, lim, values)
            else:
                band = np.zeros(values.shape, dtype=bool)
        bad = ~np.isfinite(values) & ~band
        if bad.any():
            i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
            raise SingularKernelError(qc[i, 0], inner.points[j])
        if weight is not None:
            values = values * weight(qc, p)
        out[start:start + qc.shape[0]] = np.sum(values, axis=1) * inner.step
    result = out.reshape(q_arr.shape)
    return result if np.ndim(q) > 0 else result.reshape(())

def double_integral_patched(kernel: Kernel, limit: Callable[[np.ndarray], np.ndarray], outer_size: int, inner_size: int,
                            tol_eps: float = 1e-6, energy: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                            weight: Optional[Kernel] = None) -> PatchedIntegral:
    """Double integral over the torus with a removable-singularity patch. The outer grid holds midpoints, the inner grid is shifted by half a step.

    Args:
        kernel (Kernel): Vectorised kernel K(q, p).
        limit (Callable[[np.ndarray], np.ndarray]): On-diagonal limit of K as a function of q.
        outer_size (int): Nodes of the outer (q) grid.
        inner_size (int): Nodes of the inner (p) grid.
        tol_eps (float, optional): Energy tolerance of the patch band. Defaults to 1e-6.
        energy (Optional[Callable[[np.ndarray], np.ndarray]], optional): Energy locating the singular set. Defaults to None.
        weight (Optional[Kernel], optional): Smooth factor multiplying the patched kernel. Defaults to None.

    Returns:
        PatchedIntegral: Inner integrals at the outer nodes and the outer integral.
    """
    outer = QuadratureGrid(outer_size)
    inner = QuadratureGrid(inner_size, shifted=True)
    values = inner_integral_patched(outer.points, kernel, limit, inner, tol_eps, energy=energy, weight=weight)
    values.setflags(write=False)
    return PatchedIntegral(outer=outer, inner_values=values, total=outer.integrate(values))
