import math
import numpy as np
import pytest
from scipy.special import i0
from dwitness.Numerics.quadrature import (QuadratureGrid, grid_size, periodic_integral, inner_integral_patched,
                                          double_integral_patched)
from dwitness.errors import NonFiniteIntegrandError, SingularKernelError

@pytest.mark.parametrize('beta,expected', [(1.0, 256), (16.0, 256), (200.0, 3200), (1000.0 / 3.0, 5334)])
def test_grid_size(beta, expected):
    assert grid_size(beta) == expected

def test_grid_nodes():
    g = QuadratureGrid(16)
    assert g.points[0] == pytest.approx(-math.pi + math.pi / 16)
    assert g.weights.sum() == pytest.approx(2 * math.pi)
    assert not g.points.flags.writeable
    s = QuadratureGrid(16, shifted=True)
    assert s.points[0] == -math.pi
    with pytest.raises(ValueError):
        QuadratureGrid(4)

def test_trigonometric_polynomials_are_exact():
    assert periodic_integral(lambda q: np.cos(q) ** 2, 16) == pytest.approx(math.pi, abs=1e-14)
    assert periodic_integral(lambda q: np.cos(3 * q), 16) == pytest.approx(0.0, abs=1e-14)

def test_spectral_accuracy_on_smooth_integrand():
    exact = 2 * math.pi * i0(1.0)
    assert periodic_integral(lambda q: np.exp(np.cos(q)), 32) == pytest.approx(exact, rel=1e-14)

def test_non_finite_integrand_is_reported():
    with pytest.raises(NonFiniteIntegrandError):
        periodic_integral(lambda q: np.where(q > 0, np.nan, 1.0), 16)

def test_patched_double_integral_removes_singularity():
    # (e_p^2 - e_q^2) / (e_p - e_q) is e_p + e_q away from the diagonal, 0/0 on it
    energy = np.cos
    kernel = lambda q, p: (np.cos(p) ** 2 - np.cos(q) ** 2) / (np.cos(p) - np.cos(q))
    limit = lambda q: 2 * np.cos(q)
    result = double_integral_patched(kernel, limit, 64, 64, tol_eps=1e-6, energy=energy)
    assert result.total == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(result.inner_values, 2 * math.pi * np.cos(result.outer.points), atol=1e-9)
    assert not result.inner_values.flags.writeable

def test_weighted_inner_integral():
    inner = QuadratureGrid(32, shifted=True)
    values = inner_integral_patched(np.array([0.3, 1.1]), lambda q, p: np.ones_like(q + p), lambda q: np.ones_like(q), inner,
                                    1e-6, weight=lambda q, p: np.cos(0.5 * (q + p)) ** 2)
    np.testing.assert_allclose(values, [math.pi, math.pi], atol=1e-12)

def test_unpatched_singular_kernel_raises():
    inner = QuadratureGrid(16, shifted=True)
    with pytest.raises(SingularKernelError):
        inner_integral_patched(0.5, lambda q, p: 1.0 / (p + 0.0 * q), lambda q: q, inner, 1e-6)
