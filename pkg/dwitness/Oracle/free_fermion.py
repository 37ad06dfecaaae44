from __future__ import annotations
import math
import warnings
import numpy as np
from dataclasses import dataclass
from typing import Literal, Optional, Tuple
from ..Physics.chain import ChainParams, DisorderSpec, WitnessResult, AverageKind, AVERAGE_KINDS, T_MIN, check_option, check_temperature, fermi
from ..Numerics.linalg import TridiagMatrix

Normalization = Literal['bonds', 'sites']
NORMALIZATIONS = ('bonds', 'sites')
MAX_WEIGHT = 1.0 - 1e-12
# The oracle spectrum is -2J cos k - 2B; mapping k -> pi - k onto 2J cos q - 2B flips the signed witness.
DISPERSION_SIGN = -1.0

class Realization:
    """One disorder configuration of an open chain of N sites.
    """
    def __init__(self, couplings: np.ndarray, fields: np.ndarray, seed_index: int = 0) -> None:
        """Initialising the realization.

        Args:
            couplings (np.ndarray): N-1 coupling shifts j_l, added to J.
            fields (np.ndarray): N field shifts b_l, added to B.
            seed_index (int, optional): Sample index the realization was drawn for. Defaults to 0.
        """
        couplings = np.array(couplings, dtype=float).ravel()
        fields = np.array(fields, dtype=float).ravel()
        if fields.shape[0] < 2:
            raise ValueError(f'A chain needs at least two sites, got {fields.shape[0]}.')
        if couplings.shape[0] != fields.shape[0] - 1:
            raise ValueError(f'Got {couplings.shape[0]} couplings for {fields.shape[0]} sites.')
        if not (np.isfinite(couplings).all() and np.isfinite(fields).all()):
            raise ValueError('Disorder entries must be finite.')
        couplings.setflags(write=False)
        fields.setflags(write=False)
        self._couplings = couplings
        self._fields = fields
        self._seed_index = int(seed_index)

    @classmethod
    def clean(cls, sites: int) -> Realization:
        """Realization without disorder.

        Args:
            sites (int): Number of sites.

        Returns:
            Realization: All-zero realization.
        """
        return cls(np.zeros(sites - 1), np.zeros(sites))

    @property
    def couplings(self) -> np.ndarray:
        return self._couplings

    @property
    def fields(self) -> np.ndarray:
        return self._fields

    @property
    def seed_index(self) -> int:
        return self._seed_index

    @property
    def sites(self) -> int:
        return self._fields.shape[0]

    def combine(self, other: Realization) -> Realization:
        """Realization carrying the disorder of both realizations, e.g. a coupling and a field draw.

        Args:
            other (Realization): Realization on the same number of sites.

        Returns:
            Realization: Entry-wise sum.
        """
        if other.sites != self.sites:
            raise ValueError(f'Cannot combine realizations of {self.sites} and {other.sites} sites.')
        return Realization(self.couplings + other.couplings, self.fields + other.fields, seed_index=self.seed_index)

    def mirrored(self) -> Realization:
        """Realization of the reflected chain, site l -> N+1-l.

        Returns:
            Realization: Mirrored realization.
        """
        return Realization(self.couplings[::-1], self.fields[::-1], seed_index=self.seed_index)

    def __repr__(self) -> str:
        return f'Realization(sites={self.sites}, seed_index={self.seed_index})'

def standard_normals(sites: int, seed: int, index: int) -> Tuple[np.ndarray, np.ndarray]:
    """Unit Gaussians for the couplings and fields of sample index, from a counter-based stream keyed by (seed, index).

    Args:
        sites (int): Number of sites.
        seed (int): Run seed.
        index (int): Sample index.

    Returns:
        Tuple[np.ndarray, np.ndarray]: N-1 coupling draws followed by N field draws.
    """
    if (seed < 0) or (index < 0):
        raise ValueError(f'Seed and index must be non-negative, got seed={seed} and index={index}.')
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))
    couplings = rng.standard_normal(sites - 1)
    fields = rng.standard_normal(sites)
    return couplings, fields

def sample_realization(spec: DisorderSpec, sites: int, seed: int, index: int) -> Realization:
    """Draw the realization of sample index. Entries of the active channel are Normal(0, variance); the other channel is zero.

    The same (seed, index) always gives the same realization, whatever the call order or thread count, and
    different variances reuse the same unit draws.

    Args:
        spec (DisorderSpec): Disorder channel and variance.
        sites (int): Number of sites, at least 2.
        seed (int): Run seed.
        index (int): Sample index.

    Returns:
        Realization: Sampled realization.
    """
    if sites < 2:
        raise ValueError(f'A chain needs at least two sites, got {sites}.')
    if spec.variance == 0:
        return Realization(np.zeros(sites - 1), np.zeros(sites), seed_index=index)
    z_couplings, z_fields = standard_normals(sites, seed, index)
    scale = math.sqrt(spec.variance)
    if spec.channel == 'coupling':
        return Realization(scale * z_couplings, np.zeros(sites), seed_index=index)
    return Realization(np.zeros(sites - 1), scale * z_fields, seed_index=index)

def single_particle_matrix(r: Realization, params: ChainParams) -> Tuple[TridiagMatrix, float]:
    """Jordan-Wigner single-particle matrix of the open chain and the constant energy shift.

    Args:
        r (Realization): Disorder realization.
        params (ChainParams): Chain parameters.

    Returns:
        Tuple[TridiagMatrix, float]: Matrix with diagonal -2(B + b_l) and off-diagonal -(J + j_l), and sum_l (B + b_l).
    """
    from ..Numerics.linalg import ordered_sum
    fields = params.B + r.fields
    m = TridiagMatrix(-2.0 * fields, -(params.J + r.couplings))
    return m, ordered_sum(fields)

def realization_witness(r: Realization, params: ChainParams, normalization: Normalization = 'bonds',
                        t_min: float = T_MIN) -> Tuple[float, float]:
    """Exact signed witness and ln Z of one realization.

    Args:
        r (Realization): Disorder realization.
        params (ChainParams): Chain parameters.
        normalization (Normalization, optional): Divide the bond sum by N-1 ("bonds") or N ("sites"). Defaults to 'bonds'.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        Tuple[float, float]: (signed witness, ln Z).
    """
    from ..Numerics.linalg import tridiag_eigh, ordered_sum
    normalization = check_option(normalization, NORMALIZATIONS, 'Normalization')
    check_temperature(params, t_min)
    m, shift = single_particle_matrix(r, params)
    evals, evecs = tridiag_eigh(m)
    beta = params.beta
    lnZ = -beta * shift + ordered_sum(np.logaddexp(0.0, -beta * evals))
    occupation = fermi(evals, beta)
    bonds = ((evecs[:-1] * occupation) * evecs[1:]).sum(axis=1)
    count = (r.sites - 1) if normalization == 'bonds' else r.sites
    return 4.0 * ordered_sum(bonds) / count, lnZ

def sample_witnesses(params: ChainParams, spec: DisorderSpec, sites: int, samples: int, seed: int, n_jobs: int = -1,
                     progress: bool = False, normalization: Normalization = 'bonds', t_min: float = T_MIN) -> Tuple[np.ndarray, np.ndarray]:
    """Signed witness and ln Z for the samples 0..samples-1, in index order.

    Args:
        params (ChainParams): Chain parameters.
        spec (DisorderSpec): Disorder specification.
        sites (int): Number of sites.
        samples (int): Number of realizations.
        seed (int): Run seed.
        n_jobs (int, optional): Worker threads, -1 for all cores. Defaults to -1.
        progress (bool, optional): Whether to show a progress bar. Defaults to False.
        normalization (Normalization, optional): Bond-sum normalization. Defaults to 'bonds'.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Witness values and ln Z values, one slot per sample.
    """
    from ..utils import parallel_map
    if samples < 1:
        raise ValueError(f'Need at least one sample, got {samples}.')
    check_temperature(params, t_min)
    if spec.variance == 0:
        w, lnZ = realization_witness(Realization.clean(sites), params, normalization, t_min)
        return np.full(samples, w), np.full(samples, lnZ)
    def evaluate(index: int) -> Tuple[float, float]:
        return realization_witness(sample_realization(spec, sites, seed, index), params, normalization, t_min)
    results = parallel_map(evaluate, list(range(samples)), n_jobs=n_jobs, progress=progress, desc='realizations')
    w = np.empty(samples)
    lnZ = np.empty(samples)
    for i, (wi, li) in enumerate(results):
        w[i] = wi
        lnZ[i] = li
    return w, lnZ

@dataclass(frozen=True)
class OracleEstimate:
    """Disorder average of the finite-chain witness with its jackknife error.

    The signed values are in the oracle's own sign convention; dispersion_signed converts to the 2J cos q - 2B convention.
    """
    kind: str
    mean: float
    std_err: float
    samples: int
    signed_mean: float
    effective_samples: float
    abs_mean: float

    @property
    def dispersion_signed(self) -> float:
        return DISPERSION_SIGN * self.signed_mean

    @property
    def entangled(self) -> bool:
        return self.mean > 1.0

    def to_dict(self) -> dict:
        return dict(kind=self.kind, mean=self.mean, std_err=self.std_err, samples=self.samples, signed_mean=self.signed_mean,
                    effective_samples=self.effective_samples, abs_mean=self.abs_mean)

def annealed_weights(lnZ: np.ndarray) -> np.ndarray:
    """Normalised Z weights of the samples, refusing a single dominant sample.

    Args:
        lnZ (np.ndarray): ln Z of each sample.

    Returns:
        np.ndarray: Weights summing to one.
    """
    from ..Numerics.linalg import logsumexp_weights
    from ..errors import DegenerateWeightsError
    weights = logsumexp_weights(lnZ)
    if (weights.shape[0] > 1) and (weights.max() > MAX_WEIGHT):
        raise DegenerateWeightsError(f'One annealed weight is {weights.max()!r}; the effective sample size has collapsed to 1.')
    return weights

def estimate_from_samples(w: np.ndarray, lnZ: np.ndarray, kind: AverageKind) -> OracleEstimate:
    """Reduce per-sample witnesses to a quenched (plain) or annealed (Z-weighted) average.

    Args:
        w (np.ndarray): Signed witness per sample.
        lnZ (np.ndarray): ln Z per sample.
        kind (AverageKind): Kind of average; "none" behaves as "quenched".

    Returns:
        OracleEstimate: Average, jackknife error and diagnostics.
    """
    from ..Numerics.linalg import (ordered_sum, leave_one_out_means, weighted_leave_one_out_means,
                                   jackknife_error, effective_sample_size)
    from ..errors import EffectiveSampleWarning
    kind = check_option(kind, AVERAGE_KINDS, 'Average kind')
    w = np.asarray(w, dtype=float)
    lnZ = np.asarray(lnZ, dtype=float)
    count = w.shape[0]
    abs_mean = ordered_sum(np.abs(w)) / count
    if kind == 'annealed':
        weights = annealed_weights(lnZ)
        signed = ordered_sum(w * weights)
        m_eff = effective_sample_size(weights)
        std_err = jackknife_error(weighted_leave_one_out_means(w, weights)) if count > 1 else 0.0
        if m_eff < 0.5 * count:
            warnings.warn(f'annealed effective sample size {m_eff:.1f} is below half of {count} samples', EffectiveSampleWarning, stacklevel=2)
    else:
        signed = ordered_sum(w) / count
        m_eff = float(count)
        std_err = jackknife_error(leave_one_out_means(w)) if count > 1 else 0.0
    return OracleEstimate(kind=kind, mean=abs(signed), std_err=std_err, samples=count, signed_mean=signed,
                          effective_samples=m_eff, abs_mean=abs_mean)

def oracle_witness(params: ChainParams, spec: DisorderSpec, sites: int, samples: int, seed: int, kind: AverageKind = 'quenched',
                   n_jobs: int = -1, progress: bool = False, normalization: Normalization = 'bonds', t_min: float = T_MIN) -> OracleEstimate:
    """Monte Carlo disorder average of the exact finite-chain witness.

    The quenched average is the plain mean of the per-sample signed witness (derivative of <ln Z>); the annealed average
    weights every sample by its Z (derivative of ln <Z>). Errors come from the jackknife.

    Args:
        params (ChainParams): Chain parameters.
        spec (DisorderSpec): Disorder specification, either channel.
        sites (int): Number of sites, at least 4.
        samples (int): Number of realizations; at least 2 unless the variance is zero.
        seed (int): Run seed.
        kind (AverageKind, optional): "quenched" or "annealed"; "none" only for zero variance. Defaults to 'quenched'.
        n_jobs (int, optional): Worker threads. Defaults to -1.
        progress (bool, optional): Whether to show a progress bar. Defaults to False.
        normalization (Normalization, optional): Bond-sum normalization. Defaults to 'bonds'.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        OracleEstimate: Estimate, identical for any n_jobs.
    """
    kind = check_option(kind, AVERAGE_KINDS, 'Average kind')
    if sites < 4:
        raise ValueError(f'The oracle needs at least four sites, got {sites}.')
    if (kind == 'none') and (spec.variance > 0):
        raise ValueError('Average kind "none" requires zero disorder variance.')
    if (spec.variance > 0) and (samples < 2):
        raise ValueError(f'A disorder average needs at least two samples, got {samples}.')
    w, lnZ = sample_witnesses(params, spec, sites, samples, seed, n_jobs=n_jobs, progress=progress,
                              normalization=normalization, t_min=t_min)
    if spec.variance == 0:
        return OracleEstimate(kind=kind, mean=abs(w[0]), std_err=0.0, samples=samples, signed_mean=float(w[0]),
                              effective_samples=float(samples), abs_mean=abs(w[0]))
    return estimate_from_samples(w, lnZ, kind)

def oracle_result(params: ChainParams, spec: DisorderSpec, sites: int, samples: int, seed: int, kind: AverageKind = 'quenched',
                  n_jobs: int = -1, progress: bool = False, t_min: float = T_MIN) -> Tuple[WitnessResult, OracleEstimate]:
    """Oracle estimate split into the clean finite-chain witness and the disorder correction, in the 2J cos q - 2B convention.

    Args:
        params (ChainParams): Chain parameters.
        spec (DisorderSpec): Disorder specification.
        sites (int): Number of sites.
        samples (int): Number of realizations.
        seed (int): Run seed.
        kind (AverageKind, optional): Kind of average. Defaults to 'quenched'.
        n_jobs (int, optional): Worker threads. Defaults to -1.
        progress (bool, optional): Whether to show a progress bar. Defaults to False.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        Tuple[WitnessResult, OracleEstimate]: Witness with clean and correction parts, and the raw estimate.
    """
    clean = DISPERSION_SIGN * realization_witness(Realization.clean(sites), params, t_min=t_min)[0]
    estimate = oracle_witness(params, spec, sites, samples, seed, kind, n_jobs=n_jobs, progress=progress, t_min=t_min)
    correction = 0.0 if spec.variance == 0 else estimate.dispersion_signed - clean
    return WitnessResult(clean, correction, average_kind=kind), estimate
