from __future__ import annotations
import numpy as np
from functools import lru_cache
from typing import Tuple
from ..Physics.chain import ChainParams
from .free_fermion import Realization

MAX_SITES = 12
SYMMETRY_TOL = 1e-13

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
# sigma^x sigma^x + sigma^y sigma^y on two sites, 2 (sigma^+ sigma^- + sigma^- sigma^+); real in the sigma^z basis
XY_BOND = np.array([[0.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 2.0, 0.0],
                    [0.0, 2.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 0.0]])

def _check_sites(sites: int) -> None:
    from ..errors import SizeCapError
    if sites > MAX_SITES:
        raise SizeCapError(f'Dense diagonalisation is capped at {MAX_SITES} sites, got {sites}.')
    if sites < 2:
        raise ValueError(f'A chain needs at least two sites, got {sites}.')

class SpinOperatorMatrix:
    """Dense real symmetric operator on N spins, basis ordered with site 0 as the leading tensor factor.
    """
    def __init__(self, matrix: np.ndarray) -> None:
        """Initialising the operator.

        Args:
            matrix (np.ndarray): Square array of dimension 2^N with N <= 12.
        """
        matrix = np.asarray(matrix, dtype=float)
        dim = matrix.shape[0]
        if (matrix.ndim != 2) or (matrix.shape[1] != dim) or (dim < 2) or (dim & (dim - 1)):
            raise ValueError(f'Spin operators must be square with a power-of-two dimension, got shape {matrix.shape}.')
        sites = dim.bit_length() - 1
        _check_sites(sites)
        asymmetry = float(np.max(np.abs(matrix - matrix.T)))
        if asymmetry > SYMMETRY_TOL:
            raise ValueError(f'Spin operator is not symmetric (max asymmetry {asymmetry!r}).')
        self._matrix = matrix
        self._sites = sites

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def sites(self) -> int:
        return self._sites

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f'SpinOperatorMatrix(sites={self.sites})'

def _embed(local: np.ndarray, site: int, sites: int):
    from scipy.sparse import kron, identity
    span = int(round(np.log2(local.shape[0])))
    left = identity(2 ** site, format='csr')
    right = identity(2 ** (sites - site - span), format='csr')
    return kron(kron(left, local, format='csr'), right, format='csr')

@lru_cache(maxsize=None)
def bond_sum_operator(sites: int) -> SpinOperatorMatrix:
    """Sum over the N-1 bonds of sigma^x sigma^x + sigma^y sigma^y.

    Args:
        sites (int): Number of sites.

    Returns:
        SpinOperatorMatrix: Bond-sum operator.
    """
    _check_sites(sites)
    total = sum(map(lambda l: _embed(XY_BOND, l, sites), range(sites - 1)))
    return SpinOperatorMatrix(total.toarray())

def build_hamiltonian(r: Realization, params: ChainParams) -> SpinOperatorMatrix:
    """Open-chain Hamiltonian -sum_l [(J + j_l)/2 (sigma^x sigma^x + sigma^y sigma^y) + (B + b_l) sigma^z], assembled from Kronecker products.

    Args:
        r (Realization): Disorder realization.
        params (ChainParams): Chain parameters.

    Returns:
        SpinOperatorMatrix: Hamiltonian.
    """
    sites = r.sites
    _check_sites(sites)
    h = None
    for l in range(sites - 1):
        term = _embed(XY_BOND, l, sites) * (-0.5 * (params.J + r.couplings[l]))
        h = term if h is None else h + term
    for l in range(sites):
        h = h + _embed(SIGMA_Z, l, sites) * (-(params.B + r.fields[l]))
    return SpinOperatorMatrix(h.toarray())

def thermal_observables(h: SpinOperatorMatrix, params: ChainParams) -> Tuple[float, float]:
    """ln Z and the bond-averaged thermal witness (1/(N-1)) sum_l <sigma^x sigma^x + sigma^y sigma^y>.

    Args:
        h (SpinOperatorMatrix): Hamiltonian.
        params (ChainParams): Chain parameters; only T is used.

    Returns:
        Tuple[float, float]: (ln Z, signed witness).
    """
    from scipy.special import logsumexp, softmax
    from ..errors import EigenConvergenceError
    try:
        evals, evecs = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as e:
        raise EigenConvergenceError(f'Dense eigensolver did not converge for {h.sites} sites: {e}')
    exponent = -params.beta * evals
    probabilities = softmax(exponent)
    bonds = bond_sum_operator(h.sites).matrix
    expectations = ((bonds @ evecs) * evecs).sum(axis=0)
    return float(logsumexp(exponent)), float(probabilities @ expectations) / (h.sites - 1)

def random_product_states(sites: int, count: int, seed: int) -> np.ndarray:
    """Random product states of single-site pure states, uniform on each Bloch sphere.

    Args:
        sites (int): Number of sites.
        count (int): Number of states.
        seed (int): Seed of the stream.

    Returns:
        np.ndarray: Complex array of shape (count, 2^N), normalised rows.
    """
    _check_sites(sites)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(sites)])))
    cos_theta = rng.uniform(-1.0, 1.0, size=(count, sites))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=(count, sites))
    theta = np.arccos(cos_theta)
    local = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)
    states = local[:, 0, :]
    for l in range(1, sites):
        states = (states[:, :, None] * local[:, l, None, :]).reshape(count, -1)
    return states

def product_state_witness(states: np.ndarray, sites: int) -> np.ndarray:
    """Bond-averaged <sigma^x sigma^x + sigma^y sigma^y> of pure states.

    Args:
        states (np.ndarray): States as rows, shape (count, 2^N).
        sites (int): Number of sites.

    Returns:
        np.ndarray: Witness value of each state.
    """
    bonds = bond_sum_operator(sites).matrix
    values = np.einsum('ki,ij,kj->k', states.conj(), bonds, states).real
    return values / (sites - 1)
