from __future__ import annotations
import numpy as np
from typing import Sequence

SEGMENT_COLUMNS = ('B0', 'T0', 'B1', 'T1')

def extract_level_set(values: np.ndarray, B_axis: Sequence[float], T_axis: Sequence[float], level: float = 1.0) -> np.ndarray:
    """Marching-squares segments of the level set values == level, in (B, T) coordinates.

    Crossings are located by linear interpolation along cell edges. Cells that lie entirely above or below
    the level produce no segment.

    Args:
        values (np.ndarray): Grid of shape (len(T_axis), len(B_axis)); row i holds temperature T_axis[i].
        B_axis (Sequence[float]): Ascending field axis.
        T_axis (Sequence[float]): Ascending temperature axis.
        level (float, optional): Contour level. Defaults to 1.0.

    Returns:
        np.ndarray: Array of shape (k, 4) with one segment (B0, T0, B1, T1) per row.
    """
    from skimage.measure import find_contours
    from ..errors import GridTooSmallError
    values = np.asarray(values, dtype=float)
    B_axis = np.asarray(B_axis, dtype=float)
    T_axis = np.asarray(T_axis, dtype=float)
    if (values.ndim != 2) or (values.shape[0] < 2) or (values.shape[1] < 2):
        raise GridTooSmallError(f'Level sets need a grid of at least 2x2 points, got shape {values.shape}.')
    if values.shape != (T_axis.shape[0], B_axis.shape[0]):
        raise ValueError(f'Grid shape {values.shape} does not match axes ({T_axis.shape[0]}, {B_axis.shape[0]}).')
    if not np.isfinite(values).all():
        raise ValueError('Level sets need finite grid values.')

    segments = []
    for path in find_contours(values, level):
        T = np.interp(path[:, 0], np.arange(T_axis.shape[0]), T_axis)
        B = np.interp(path[:, 1], np.arange(B_axis.shape[0]), B_axis)
        if path.shape[0] < 2:
            continue
        segments.append(np.column_stack([B[:-1], T[:-1], B[1:], T[1:]]))
    if len(segments) == 0:
        return np.empty((0, 4))
    segments = np.concatenate(segments, axis=0)
    # zero-length pieces appear where a contour passes exactly through a grid node
    keep = (segments[:, 0] != segments[:, 2]) | (segments[:, 1] != segments[:, 3])
    return segments[keep]
