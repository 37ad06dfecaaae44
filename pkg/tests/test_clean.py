import math
import numpy as np
import pytest
from dwitness.Physics.chain import ChainParams
from dwitness.Witness.clean import (lnZ0_density, clean_signed_witness, clean_witness, clean_witness_forms,
                                    lnZ0_coupling_derivative, zeroT_clean_witness, zeroT_critical_field)
from dwitness.errors import TemperatureTooLowError

def test_zero_field_low_temperature_anchor():
    result = clean_witness(ChainParams(J=1.0, B=0.0, T=0.005))
    assert result.magnitude == pytest.approx(4.0 / math.pi, abs=2e-3)
    assert result.signed < 0
    assert result.correction_part == 0.0
    assert result.average_kind == 'none'

def test_critical_field():
    assert zeroT_critical_field(1.0) == pytest.approx(0.61899, abs=1e-5)
    assert zeroT_clean_witness(zeroT_critical_field(2.0), 2.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        zeroT_critical_field(0.0)

@pytest.mark.parametrize('B,expected', [(0.0, 4.0 / math.pi), (1.0, 0.0), (-2.0, 0.0), (0.6, 4.0 / math.pi * 0.8)])
def test_zero_temperature_closed_form(B, expected):
    assert zeroT_clean_witness(B, 1.0) == pytest.approx(expected)

@pytest.mark.parametrize('B,T', [(0.0, 0.3), (0.4, 0.1), (1.3, 1.0), (0.9, 2.0)])
def test_occupation_and_susceptibility_forms_agree(B, T):
    forms = clean_witness_forms(ChainParams(J=1.0, B=B, T=T))
    assert forms.mismatch < 1e-12

@pytest.mark.parametrize('B,T', [(0.2, 0.2), (0.7, 0.5), (1.1, 1.5)])
def test_witness_is_coupling_derivative_of_free_energy(B, T):
    params = ChainParams(J=1.0, B=B, T=T)
    assert lnZ0_coupling_derivative(params) == pytest.approx(clean_signed_witness(params, 'tanh'), abs=1e-7)

def test_free_energy_limits():
    # infinite temperature: ln 2 per site
    assert lnZ0_density(ChainParams(J=1.0, B=0.3, T=1e4)) == pytest.approx(math.log(2.0), abs=1e-6)
    # ground state energy -(2/pi) J at B = 0
    assert ChainParams(T=0.005).T * lnZ0_density(ChainParams(J=1.0, B=0.0, T=0.005)) == pytest.approx(2.0 / math.pi, abs=1e-4)

def test_spectral_convergence_in_grid_size():
    params = ChainParams(J=1.0, B=0.4, T=1.0)
    assert clean_signed_witness(params, size=64) == pytest.approx(clean_signed_witness(params, size=512), abs=1e-13)

def test_high_temperature_is_separable():
    assert not clean_witness(ChainParams(J=1.0, B=0.0, T=50.0)).entangled

def test_temperature_floor():
    with pytest.raises(TemperatureTooLowError):
        clean_witness(ChainParams(T=0.001))
    assert clean_witness(ChainParams(T=0.001), t_min=1e-3).magnitude == pytest.approx(4.0 / math.pi, abs=1e-3)

@pytest.mark.parametrize('B,T', [(0.3, 0.05), (0.8, 0.4), (1.4, 1.0)])
def test_field_reversal_leaves_magnitude_unchanged(B, T):
    up = clean_witness(ChainParams(J=1.0, B=B, T=T)).magnitude
    down = clean_witness(ChainParams(J=1.0, B=-B, T=T)).magnitude
    assert abs(up - down) <= 1e-12

@pytest.mark.parametrize('B', [0.0, 0.5])
def test_magnitude_decreases_with_temperature(B):
    magnitudes = np.array(list(map(lambda T: clean_witness(ChainParams(J=1.0, B=B, T=T)).magnitude, np.linspace(0.01, 5.0, 40))))
    assert np.all(np.diff(magnitudes) <= 1e-12)
    assert magnitudes[0] > magnitudes[-1]

def test_magnitude_never_exceeds_zero_field_ground_state():
    bound = 4.0 / math.pi + 1e-9
    for B in np.linspace(-1.5, 1.5, 13):
        for T in [0.005, 0.05, 0.3, 2.0]:
            assert clean_witness(ChainParams(J=1.0, B=B, T=T)).magnitude <= bound
