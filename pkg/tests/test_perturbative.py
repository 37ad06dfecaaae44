import math
import numpy as np
import pytest
from dwitness.Physics.chain import ChainParams, DisorderSpec, dispersion, fermi_derivs
from dwitness.Witness.clean import clean_signed_witness
from dwitness.Witness.perturbative import (CorrectionKernelContext, kernel_K, kernel_limit, G_quenched, G_annealed,
                                           annealed_extra, first_moment, correction_slope, perturbative_witness)
from dwitness.errors import KernelBandError, FieldChannelUnsupportedError, PerturbativeValidityWarning, TemperatureTooLowError

params = ChainParams(J=1.0, B=0.5, T=0.2)

def test_zero_variance_is_exactly_clean():
    result = perturbative_witness(params, DisorderSpec('coupling', 0.0), 'quenched')
    assert result.correction_part == 0.0
    assert result.signed == clean_signed_witness(params)

def test_correction_is_linear_in_variance():
    base = perturbative_witness(params, DisorderSpec('coupling', 0.0), 'none').signed
    one = perturbative_witness(params, DisorderSpec('coupling', 5e-5)).signed - base
    two = perturbative_witness(params, DisorderSpec('coupling', 1e-4)).signed - base
    assert two == pytest.approx(2.0 * one, rel=1e-9)

def test_options_are_checked():
    with pytest.raises(FieldChannelUnsupportedError):
        perturbative_witness(params, DisorderSpec('field', 1e-5))
    with pytest.raises(ValueError):
        perturbative_witness(params, DisorderSpec('coupling', 1e-5), 'none')
    with pytest.raises(ValueError, match='not supported'):
        perturbative_witness(params, DisorderSpec('coupling', 1e-5), 'typical')
    with pytest.raises(TemperatureTooLowError):
        perturbative_witness(params.replace(T=1e-3), DisorderSpec('coupling', 1e-5))

def test_validity_warning_and_computation_proceeds():
    with pytest.warns(PerturbativeValidityWarning, match='delta exceeds perturbative validity 1e-4'):
        result = perturbative_witness(params, DisorderSpec('coupling', 2e-4))
    assert math.isfinite(result.signed)

def test_kernel_band_contract():
    q = 0.7
    ctx = CorrectionKernelContext.at(q, params)
    p = math.acos(math.cos(q) + 1e-7 / (2 * params.J))
    with pytest.raises(KernelBandError):
        kernel_K(q, p, ctx)
    with pytest.raises(ValueError):
        kernel_K(0.8, 2.0, ctx)
    n2 = fermi_derivs(dispersion(q, params), params.beta)[2]
    assert kernel_limit(q, ctx) == pytest.approx(-0.5 * n2)

def test_kernel_approaches_limit():
    q = 1.1
    ctx = CorrectionKernelContext.at(q, params)
    scale = params.beta ** 2 * ctx.n * (1 - ctx.n)
    previous = math.inf
    for gap in [1e-2, 1e-3, 1e-4]:
        p = math.acos(math.cos(q) + gap / (2 * params.J))
        deviation = abs(kernel_K(q, p, ctx) - kernel_limit(q, ctx)) / scale
        assert deviation < previous
        previous = deviation
    assert previous < 1e-3

def test_annealed_function_adds_separable_term():
    q = np.linspace(-3.0, 3.0, 7)
    np.testing.assert_allclose(G_annealed(q, params, size=256), G_quenched(q, params, size=256) + annealed_extra(q, params, size=256),
                               rtol=1e-13, atol=1e-13)
    assert isinstance(G_quenched(0.4, params, size=256), float)

def test_first_moment_identity():
    for p in [params, ChainParams(J=1.0, B=0.0, T=0.5), ChainParams(J=1.0, B=1.5, T=1.0)]:
        assert first_moment(p, 512) == pytest.approx(0.5 * math.pi * clean_signed_witness(p, size=512), abs=1e-13)

def test_correction_converges_in_grid_size():
    p = ChainParams(J=1.0, B=0.3, T=0.5)
    assert correction_slope(p, 'quenched', 256) == pytest.approx(correction_slope(p, 'quenched', 512), rel=1e-6)

def test_low_temperature_correction_is_finite():
    values = G_quenched(np.array([0.3, 1.2, 2.5]), ChainParams(J=1.0, B=0.5, T=0.005))
    assert np.isfinite(values).all()

@pytest.mark.parametrize('B,T', [(0.0, 1.0), (0.3, 0.2), (0.8, 0.1), (1.5, 0.5)])
def test_annealed_magnitude_is_not_below_quenched(B, T):
    p = ChainParams(J=1.0, B=B, T=T)
    quenched = perturbative_witness(p, DisorderSpec('coupling', 1e-4), 'quenched')
    annealed = perturbative_witness(p, DisorderSpec('coupling', 1e-4), 'annealed')
    assert annealed.magnitude >= quenched.magnitude
    assert annealed.clean_part == quenched.clean_part

@pytest.mark.parametrize('kind', ['quenched', 'annealed'])
def test_field_reversal_leaves_magnitude_unchanged(kind):
    disorder = DisorderSpec('coupling', 1e-4)
    up = perturbative_witness(ChainParams(J=1.0, B=0.4, T=0.3), disorder, kind, size=256)
    down = perturbative_witness(ChainParams(J=1.0, B=-0.4, T=0.3), disorder, kind, size=256)
    assert abs(up.magnitude - down.magnitude) <= 1e-10
    assert abs(up.correction_part - down.correction_part) <= 1e-10

def test_quenched_function_is_even():
    p = ChainParams(J=1.0, B=0.3, T=0.4)
    q = np.array([0.2, 0.9, 1.7, 2.8])
    np.testing.assert_allclose(G_quenched(q, p, size=256), G_quenched(-q, p, size=256), rtol=1e-10, atol=1e-12)

def test_annealed_term_vanishes_at_quarter_period():
    p = ChainParams(J=1.0, B=0.3, T=0.5)
    assert G_annealed(math.pi / 2, p, size=256) == pytest.approx(G_quenched(math.pi / 2, p, size=256), rel=0, abs=1e-12)

@pytest.mark.parametrize('kind', ['quenched', 'annealed'])
def test_slope_is_outer_integral_of_correction_function(kind):
    p = ChainParams(J=1.0, B=0.6, T=0.25)
    size = 256
    q = -math.pi + (np.arange(size) + 0.5) * (2.0 * math.pi / size)
    G = G_quenched(q, p, size=size) if kind == 'quenched' else G_annealed(q, p, size=size)
    expected = -2.0 / math.pi * np.sum(np.cos(q) * G) * (2.0 * math.pi / size)
    assert correction_slope(p, kind, size) == pytest.approx(expected, rel=1e-10, abs=1e-13)
