from __future__ import annotations
import math
import warnings
import numpy as np
from dataclasses import dataclass, field
from typing import List, Optional, Sequence
from ..Physics.chain import ChainParams, DisorderSpec, AverageKind, T_MIN, TOL_EPS, check_option

RELATIVE_TOL = 0.15
SIGMA_TOL = 3.0

@dataclass(frozen=True)
class SlopeRow:
    """Measured and predicted witness slope at one variance, in the 2J cos q - 2B sign convention.
    """
    delta: float
    kind: str
    measured: float
    std_err: float
    predicted: float
    effective_samples: float

    @property
    def allowed(self) -> float:
        """Looser of the relative and the statistical tolerance.

        Returns:
            float: max(0.15 |predicted|, 3 std_err).
        """
        return max(RELATIVE_TOL * abs(self.predicted), SIGMA_TOL * self.std_err)

    @property
    def deviation(self) -> float:
        return abs(self.measured - self.predicted)

    @property
    def passed(self) -> bool:
        return self.deviation <= self.allowed

@dataclass(frozen=True)
class PairedDifference:
    """Annealed minus quenched slope estimated on the same realizations.
    """
    delta: float
    difference: float
    paired_err: float
    unpaired_err: float

    @property
    def significant(self) -> bool:
        return abs(self.difference) > SIGMA_TOL * self.paired_err

@dataclass(frozen=True)
class SlopeReport:
    """Slope comparison over a list of variances.
    """
    params: ChainParams
    sites: int
    samples: int
    seed: int
    rows: List[SlopeRow] = field(default_factory=list)
    differences: List[PairedDifference] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(map(lambda r: r.passed, self.rows))

    def lines(self) -> List[str]:
        """Human-readable report.

        Returns:
            List[str]: One line per row plus the verdict.
        """
        p = self.params
        out = [f'slope check J={p.J:g} B={p.B:g} T={p.T:g} sites={self.sites} samples={self.samples} seed={self.seed}']
        for r in self.rows:
            out.append(f'{r.kind:<9} delta={r.delta:.3e} measured={r.measured:+.6f} +- {r.std_err:.6f} '
                       f'predicted={r.predicted:+.6f} deviation={r.deviation:.6f} allowed={r.allowed:.6f} '
                       f'M_eff={r.effective_samples:.1f} {"PASS" if r.passed else "FAIL"}')
        for d in self.differences:
            out.append(f'annealed-quenched delta={d.delta:.3e} difference={d.difference:+.6f} '
                       f'paired_err={d.paired_err:.6f} unpaired_err={d.unpaired_err:.6f} '
                       f'{"distinct" if d.significant else "not distinct"}')
        out.append(f'verdict {"PASS" if self.passed else "FAIL"}')
        return out

    def to_dict(self) -> dict:
        return dict(params=self.params.to_dict(), sites=self.sites, samples=self.samples, seed=self.seed,
                    rows=list(map(lambda r: dict(delta=r.delta, kind=r.kind, measured=r.measured, std_err=r.std_err,
                                                 predicted=r.predicted, allowed=r.allowed, passed=r.passed,
                                                 effective_samples=r.effective_samples), self.rows)),
                    differences=list(map(lambda d: dict(delta=d.delta, difference=d.difference, paired_err=d.paired_err,
                                                        unpaired_err=d.unpaired_err, significant=d.significant), self.differences)),
                    passed=self.passed)

def slope_report(params: ChainParams, deltas: Sequence[float], sites: int = 512, samples: int = 2000, seed: int = 0,
                 kinds: Sequence[AverageKind] = ('quenched',), n_jobs: int = -1, progress: bool = False,
                 size: Optional[int] = None, tol_eps: float = TOL_EPS, t_min: float = T_MIN) -> SlopeReport:
    """Compare the finite-chain slope (w(delta) - w(0))/delta with the first-order prediction.

    Every variance reuses the same unit draws, so the runs are paired through common random numbers; the
    zero-variance baseline is the deterministic clean chain.

    Args:
        params (ChainParams): Chain parameters.
        deltas (Sequence[float]): Variances; zeros are skipped, at least one must be positive.
        sites (int, optional): Chain length. Defaults to 512.
        samples (int, optional): Realizations per variance. Defaults to 2000.
        seed (int, optional): Run seed. Defaults to 0.
        kinds (Sequence[AverageKind], optional): Averages to check. Defaults to ('quenched',).
        n_jobs (int, optional): Worker threads. Defaults to -1.
        progress (bool, optional): Whether to show progress bars. Defaults to False.
        size (Optional[int], optional): Quadrature nodes of the prediction. Defaults to None.
        tol_eps (float, optional): Patch band half-width. Defaults to TOL_EPS.
        t_min (float, optional): Lowest supported temperature. Defaults to T_MIN.

    Returns:
        SlopeReport: Rows per (variance, kind) and the paired annealed - quenched differences.
    """
    from ..Oracle.free_fermion import Realization, realization_witness, sample_witnesses, annealed_weights, DISPERSION_SIGN
    from ..Numerics.linalg import (ordered_sum, leave_one_out_means, weighted_leave_one_out_means, jackknife_error,
                                   effective_sample_size)
    from ..Witness.perturbative import correction_slope
    from ..errors import EffectiveSampleWarning
    kinds = list(map(lambda k: check_option(k, ('quenched', 'annealed'), 'Average kind'), kinds))
    positive = list(filter(lambda d: d != 0, map(float, deltas)))
    if len(positive) == 0:
        raise ValueError('need at least one nonzero delta')
    if any(map(lambda d: d < 0, positive)):
        raise ValueError('Variances must be non-negative.')
    if samples < 2:
        raise ValueError(f'A disorder average needs at least two samples, got {samples}.')
    baseline = realization_witness(Realization.clean(sites), params, t_min=t_min)[0]
    predicted = dict(map(lambda k: (k, correction_slope(params, k, size, tol_eps, t_min)), ['quenched', 'annealed']))
    rows = []
    differences = []
    for delta in positive:
        w, lnZ = sample_witnesses(params, DisorderSpec('coupling', delta), sites, samples, seed, n_jobs=n_jobs,
                                  progress=progress, t_min=t_min)
        scale = DISPERSION_SIGN / delta
        quenched = scale * (ordered_sum(w) / samples - baseline)
        quenched_reps = scale * (leave_one_out_means(w) - baseline)
        weights = annealed_weights(lnZ)
        annealed = scale * (ordered_sum(w * weights) - baseline)
        annealed_reps = scale * (weighted_leave_one_out_means(w, weights) - baseline)
        q_err = jackknife_error(quenched_reps)
        a_err = jackknife_error(annealed_reps)
        m_eff = effective_sample_size(weights)
        if ('annealed' in kinds) and (m_eff < 0.5 * samples):
            warnings.warn(f'annealed effective sample size {m_eff:.1f} is below half of {samples} samples', EffectiveSampleWarning, stacklevel=2)
        estimates = dict(quenched=(quenched, q_err, float(samples)), annealed=(annealed, a_err, m_eff))
        for kind in kinds:
            measured, err, m_eff = estimates[kind]
            rows.append(SlopeRow(delta=delta, kind=kind, measured=measured, std_err=err, predicted=predicted[kind],
                                 effective_samples=m_eff))
        differences.append(PairedDifference(delta=delta, difference=annealed - quenched,
                                            paired_err=jackknife_error(annealed_reps - quenched_reps),
                                            unpaired_err=math.sqrt(q_err ** 2 + a_err ** 2)))
    return SlopeReport(params=params, sites=sites, samples=samples, seed=seed, rows=rows, differences=differences)
