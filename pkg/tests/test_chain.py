import math
import numpy as np
import pytest
from dwitness.Physics.chain import (ChainParams, DisorderSpec, WitnessResult, check_option, check_temperature, dispersion,
                                    fermi, fermi_derivs, fermi_third_derivative)
from dwitness.errors import TemperatureTooLowError

def test_params_are_values():
    p = ChainParams(J=1.0, B=0.5, T=0.25)
    assert p.beta == 4.0
    assert p == ChainParams(1, 0.5, 0.25)
    assert len({p, ChainParams(1, 0.5, 0.25)}) == 1
    assert p.replace(B=0.0).key == (1.0, 0.0, 0.25)
    assert p.to_dict() == dict(J=1.0, B=0.5, T=0.25)

@pytest.mark.parametrize('kwargs', [dict(T=0.0), dict(T=-1.0), dict(T=math.nan), dict(J=math.inf), dict(B=math.nan)])
def test_params_reject_bad_values(kwargs):
    with pytest.raises(ValueError):
        ChainParams(**kwargs)

def test_disorder_spec():
    d = DisorderSpec('coupling', 1e-4)
    assert d.mean == 0.0
    assert d.perturbative_valid
    assert not d.with_variance(2e-4).perturbative_valid
    assert d.with_variance(2e-4).channel == 'coupling'
    with pytest.raises(ValueError):
        DisorderSpec('coupling', -1e-6)
    with pytest.raises(ValueError, match='not supported'):
        DisorderSpec('bond', 0.0)

def test_check_option_lowercases():
    assert check_option('Quenched', ('quenched', 'annealed'), 'Average kind') == 'quenched'

def test_witness_result_parts():
    r = WitnessResult(-1.2, 0.1, average_kind='quenched')
    assert r.signed == -1.2 + 0.1
    assert r.magnitude == abs(-1.2 + 0.1)
    assert r.entangled
    assert not WitnessResult(0.3).entangled
    assert r.to_dict()['average_kind'] == 'quenched'
    with pytest.raises(ValueError):
        WitnessResult(1.0, 0.0, signed=2.0)
    with pytest.raises(ValueError):
        WitnessResult(-1.0, 0.0, magnitude=-1.0)

def test_temperature_floor():
    check_temperature(ChainParams(T=5e-3))
    with pytest.raises(TemperatureTooLowError):
        check_temperature(ChainParams(T=1e-3))

def test_dispersion_band():
    p = ChainParams(J=1.0, B=0.5, T=1.0)
    assert dispersion(0.0, p) == pytest.approx(1.0)
    assert dispersion(math.pi, p) == pytest.approx(-3.0)

def test_fermi_is_overflow_free():
    e = np.array([-1e6, 0.0, 1e6])
    with np.errstate(over='raise'):
        n = fermi(e, 1e3)
    np.testing.assert_array_equal(n, [1.0, 0.5, 0.0])

def test_fermi_derivatives_match_finite_differences():
    beta = 3.0
    e = np.linspace(-1.5, 1.5, 13)
    h = 1e-4
    n, n1, n2 = fermi_derivs(e, beta)
    np.testing.assert_allclose(n1, (fermi(e + h, beta) - fermi(e - h, beta)) / (2 * h), atol=1e-7)
    np.testing.assert_allclose(n2, (fermi(e + h, beta) - 2 * n + fermi(e - h, beta)) / h ** 2, atol=1e-5)
    n3 = fermi_third_derivative(e, beta)
    np.testing.assert_allclose(n3, (fermi_derivs(e + h, beta)[2] - fermi_derivs(e - h, beta)[2]) / (2 * h), atol=1e-5)

def test_fermi_particle_hole_symmetry():
    e = np.linspace(-40.0, 40.0, 161)
    for beta in [0.1, 1.0, 25.0]:
        np.testing.assert_allclose(fermi(e, beta) + fermi(-e, beta), 1.0, rtol=0, atol=1e-14)

def test_fermi_is_decreasing_and_dispersion_even():
    n = fermi(np.linspace(-3.0, 3.0, 61), 2.0)
    assert np.all(np.diff(n) < 0)
    q = np.linspace(-math.pi, math.pi, 33)
    p = ChainParams(J=1.3, B=0.4, T=1.0)
    np.testing.assert_array_equal(dispersion(q, p), dispersion(-q, p))
