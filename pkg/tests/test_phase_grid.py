import numpy as np
import pytest
from dwitness.Physics.chain import ChainParams, DisorderSpec
from dwitness.Scan.phase_grid import PhaseGrid, scan, region_area, containment, lobe_detector
from dwitness.errors import (AxisMismatchError, WindowOutOfRangeError, ScanAbortedError, FieldChannelUnsupportedError,
                             PerturbativeValidityWarning, TemperatureTooLowError)

def make_grid(values, B_axis, T_axis, J=1.0):
    values = np.asarray(values, dtype=float)
    meta = dict(J=J, delta=0.0, average='none', engine='perturbative', t_min=T_axis[0])
    return PhaseGrid(B_axis, T_axis, values, np.zeros_like(values), meta)

def ramp(B_axis, T_axis):
    return np.tile(2.0 * np.asarray(B_axis), (len(T_axis), 1))

def test_grid_validation():
    B = np.linspace(0.0, 1.0, 4)
    T = np.linspace(0.1, 1.0, 3)
    with pytest.raises(ValueError):
        make_grid(np.zeros((4, 3)), B, T)
    with pytest.raises(ValueError):
        make_grid(np.full((3, 4), np.nan), B, T)
    with pytest.raises(ValueError):
        PhaseGrid(B, T, np.zeros((3, 4)), np.zeros((3, 4)), dict(J=1.0))
    with pytest.raises(ValueError):
        make_grid(np.zeros((3, 4)), B[::-1], T)
    g = make_grid(-ramp(B, T), B, T)
    np.testing.assert_array_equal(g.magnitude, ramp(B, T))
    assert g.result(0, 3).entangled
    assert not g.signed.flags.writeable

def test_region_area_splits_boundary_cells():
    B = np.linspace(0.0, 1.0, 4)
    T = np.linspace(0.0, 2.0, 3)
    assert region_area(make_grid(ramp(B, T), B, T)) == pytest.approx(1.0, abs=1e-12)
    assert region_area(make_grid(np.full((3, 4), 2.0), B, T)) == pytest.approx(2.0)
    assert region_area(make_grid(np.full((3, 4), 0.5), B, T)) == 0.0

def test_boundary_of_ramp():
    B = np.linspace(0.0, 1.0, 6)
    T = np.linspace(0.1, 1.0, 4)
    segments = make_grid(ramp(B, T), B, T).boundary
    assert segments.shape[0] > 0
    np.testing.assert_allclose(segments[:, [0, 2]], 0.5, atol=1e-12)

def test_containment():
    B = np.linspace(0.0, 1.0, 4)
    T = np.linspace(0.1, 1.0, 3)
    small = make_grid(ramp(B, T) * 0.7, B, T)
    large = make_grid(ramp(B, T), B, T)
    assert containment(small, large).contained
    report = containment(large, small)
    assert report.count == 3
    assert all(map(lambda v: v[0] == pytest.approx(2.0 / 3.0), report.violations))
    with pytest.raises(AxisMismatchError):
        containment(small, make_grid(ramp(B, T), B, T + 0.1))
    with pytest.raises(AxisMismatchError):
        containment(small, make_grid(ramp(B, T), B, T, J=2.0))

def test_lobe_detector():
    B = np.linspace(0.0, 1.2, 13)
    T = np.linspace(0.005, 0.5, 12)
    values = np.full((12, 13), 0.5)
    values[np.ix_(T <= 0.05, (B >= 0.9) & (B <= 1.1))] = 1.5
    report = lobe_detector(make_grid(values, B, T))
    assert report.detected
    assert report.max_witness == 1.5
    assert not lobe_detector(make_grid(np.full((12, 13), 0.5), B, T)).detected
    with pytest.raises(WindowOutOfRangeError):
        lobe_detector(make_grid(values, B, T), B_window=(1.0, 2.0))

def test_clean_scan_crosses_critical_field():
    g = scan((0.5, 0.75), (0.005, 0.1), (26, 16), ChainParams(J=1.0), kind='none', n_jobs=1)
    assert g.shape == (16, 26)
    segments = g.boundary
    low = np.concatenate([segments[segments[:, 1] == g.T_axis[0], 0], segments[segments[:, 3] == g.T_axis[0], 2]])
    assert low.shape[0] > 0
    assert np.min(np.abs(low - 0.619)) < 0.01

def test_scan_is_row_major_in_temperature():
    g = scan((0.0, 1.2), (0.5, 1.5), 16, n_jobs=2)
    from dwitness.Witness.clean import clean_signed_witness
    assert g.signed[3, 5] == clean_signed_witness(ChainParams(J=1.0, B=g.B_axis[5], T=g.T_axis[3]))
    np.testing.assert_array_equal(g.entangled, g.magnitude > 1.0)

def test_scan_warns_once_above_validity():
    import warnings
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        scan((0.0, 1.2), (0.5, 1.5), 16, disorder=DisorderSpec('coupling', 2e-4))
    assert len(list(filter(lambda w: issubclass(w.category, PerturbativeValidityWarning), caught))) == 1

def test_scan_failures():
    with pytest.raises(ScanAbortedError) as info:
        scan((0.0, 1.2), (0.5, 1.5), 16, disorder=DisorderSpec('field', 1e-5), n_jobs=1)
    assert info.value.coordinates == (0.0, 0.5)
    assert isinstance(info.value.cause, FieldChannelUnsupportedError)
    with pytest.raises(TemperatureTooLowError):
        scan((0.0, 1.2), (0.001, 1.5), 16)
    with pytest.raises(ValueError):
        scan((0.0, 1.2), (0.5, 1.5), 8)
    with pytest.raises(ValueError):
        scan((0.0, 1.2), (0.5, 1.5), 16, engine='oracle')

def test_oracle_scan_is_thread_independent():
    kwargs = dict(disorder=DisorderSpec('coupling', 1e-3), engine='oracle', sites=8, samples=4, seed=3)
    a = scan((0.0, 1.2), (0.2, 1.5), 16, n_jobs=1, **kwargs)
    b = scan((0.0, 1.2), (0.2, 1.5), 16, n_jobs=4, **kwargs)
    np.testing.assert_array_equal(a.signed, b.signed)
    np.testing.assert_array_equal(a.std_err, b.std_err)
    assert a.meta['seed'] == 3

@pytest.mark.slow
def test_disorder_scan_boundary_stays_at_clean_transition():
    g = scan((0.0, 1.2), (0.005, 1.5), 64, disorder=DisorderSpec('coupling', 1e-4))
    segments = g.boundary
    assert segments.shape[0] > 0
    lowest = np.minimum(segments[:, 1], segments[:, 3]) <= g.T_axis[0] + 1e-12
    assert lowest.any()
    np.testing.assert_allclose(segments[lowest][:, [0, 2]], 0.619, atol=0.01)
    assert np.maximum(segments[:, 0], segments[:, 2]).max() < 0.65
    assert not g.entangled[:, g.B_axis > 0.9].any()
