from __future__ import annotations
import math
import numpy as np
from typing import Sequence, Tuple, Iterable

class TridiagMatrix:
    """Real symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
    """
    def __init__(self, diag: Sequence[float], offdiag: Sequence[float]) -> None:
        """Initialising the matrix.

        Args:
            diag (Sequence[float]): N diagonal entries.
            offdiag (Sequence[float]): N-1 off-diagonal entries.
        """
        diag = np.array(diag, dtype=float).ravel()
        offdiag = np.array(offdiag, dtype=float).ravel()
        if diag.shape[0] < 1:
            raise ValueError('Tridiagonal matrix needs at least one diagonal entry.')
        if offdiag.shape[0] != diag.shape[0] - 1:
            raise ValueError(f'Off-diagonal length {offdiag.shape[0]} does not match diagonal length {diag.shape[0]}.')
        if not (np.isfinite(diag).all() and np.isfinite(offdiag).all()):
            raise ValueError('Tridiagonal matrix entries must be finite.')
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        self._diag = diag
        self._offdiag = offdiag

    @property
    def diag(self) -> np.ndarray:
        return self._diag

    @property
    def offdiag(self) -> np.ndarray:
        return self._offdiag

    @property
    def size(self) -> int:
        return self._diag.shape[0]

    @property
    def norm(self) -> float:
        """Infinity norm (largest absolute row sum).

        Returns:
            float: Matrix norm.
        """
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def to_dense(self) -> np.ndarray:
        """Dense copy of the matrix.

        Returns:
            np.ndarray: N x N array.
        """
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def gauge_flipped(self) -> TridiagMatrix:
        """Matrix with every off-diagonal sign flipped, unitarily equivalent through diag((-1)^l).

        Returns:
            TridiagMatrix: Flipped matrix.
        """
        return TridiagMatrix(self.diag, -self.offdiag)

    def __repr__(self) -> str:
        return f'TridiagMatrix(size={self.size})'

def tridiag_eigh(m: TridiagMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric tridiagonal matrix through LAPACK's tridiagonal solver.

    Args:
        m (TridiagMatrix): Matrix to diagonalise.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Ascending eigenvalues and the orthonormal eigenvectors as columns.
    """
    from scipy.linalg import eigh_tridiagonal, LinAlgError
    from ..errors import EigenConvergenceError
    if m.size == 1:
        return m.diag.copy(), np.ones((1, 1))
    try:
        evals, evecs = eigh_tridiagonal(m.diag, m.offdiag)
    except LinAlgError as e:
        raise EigenConvergenceError(f'Tridiagonal eigensolver did not converge for a matrix of size {m.size}: {e}')
    if not (np.isfinite(evals).all() and np.isfinite(evecs).all()):
        raise EigenConvergenceError(f'Tridiagonal eigensolver returned non-finite values for a matrix of size {m.size}.')
    return evals, evecs

def logsumexp_weights(logs: Sequence[float]) -> np.ndarray:
    """Normalised weights exp(logs_i) / sum_j exp(logs_j), computed without forming exp(logs).

    Args:
        logs (Sequence[float]): Logarithms of unnormalised weights, e.g. ln Z of each sample.

    Returns:
        np.ndarray: Weights summing to one.
    """
    from scipy.special import softmax
    from ..errors import EmptyInputError
    logs = np.asarray(logs, dtype=float).ravel()
    if logs.shape[0] == 0:
        raise EmptyInputError('Cannot weight an empty sequence of logarithms.')
    if not np.isfinite(logs).all():
        raise ValueError('Log-weights must be finite.')
    return softmax(logs)

def effective_sample_size(weights: Sequence[float]) -> float:
    """Kish effective sample size 1/sum(w^2) of normalised weights.

    Args:
        weights (Sequence[float]): Weights summing to one.

    Returns:
        float: Effective number of samples, between 1 and len(weights).
    """
    weights = np.asarray(weights, dtype=float)
    return 1.0 / ordered_sum(weights * weights)

def ordered_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum; the result does not depend on the order of the addends.

    Args:
        values (Iterable[float]): Addends.

    Returns:
        float: Sum.
    """
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())

def leave_one_out_means(values: Sequence[float]) -> np.ndarray:
    """Jackknife replicas of the plain mean.

    Args:
        values (Sequence[float]): Samples, at least two.

    Returns:
        np.ndarray: Mean of the samples with sample i removed, for every i.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.shape[0] < 2:
        raise ValueError('Jackknife needs at least two samples.')
    total = ordered_sum(values)
    return (total - values) / (values.shape[0] - 1)

def weighted_leave_one_out_means(values: Sequence[float], weights: Sequence[float]) -> np.ndarray:
    """Jackknife replicas of a weighted mean; the remaining weights are renormalised after each removal.

    Args:
        values (Sequence[float]): Samples, at least two.
        weights (Sequence[float]): Normalised weights of the samples.

    Returns:
        np.ndarray: Weighted mean with sample i removed, for every i.
    """
    values = np.asarray(values, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if values.shape[0] < 2:
        raise ValueError('Jackknife needs at least two samples.')
    if values.shape != weights.shape:
        raise ValueError(f'Got {values.shape[0]} samples but {weights.shape[0]} weights.')
    total = ordered_sum(values * weights)
    return (total - values * weights) / (1.0 - weights)

def jackknife_error(replicas: Sequence[float]) -> float:
    """Standard error from jackknife replicas, sqrt((M-1)/M * sum (theta_i - theta_bar)^2).

    Args:
        replicas (Sequence[float]): Leave-one-out estimates.

    Returns:
        float: Standard error, non-negative.
    """
    replicas = np.asarray(replicas, dtype=float).ravel()
    count = replicas.shape[0]
    if count < 2:
        raise ValueError('Jackknife needs at least two replicas.')
    centre = ordered_sum(replicas) / count
    return math.sqrt((count - 1) / count * ordered_sum((replicas - centre) ** 2))
