import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson

from submig.geometry import (
    CurveSample,
    ParametricCurve,
    ThinInclusion,
    polarization_tensor,
    sample_curve,
    sigma1,
    sigma2,
)


def simpson_length(curve, n=20001):
    s = np.linspace(*curve.parameter_range, n)
    return simpson(curve.speed(s), x=s)


# frozen oracle values (independent Simpson rule, 20001 nodes)
SIGMA1_LENGTH = 1.0402288
SIGMA2_LENGTH = 1.17479


def test_frozen_arc_lengths():
    assert sigma1().arc_length() == pytest.approx(SIGMA1_LENGTH, abs=1e-6)
    assert sigma2().arc_length() == pytest.approx(SIGMA2_LENGTH, abs=1e-5)
    for c in (sigma1(), sigma2()):
        assert c.arc_length() == pytest.approx(simpson_length(c), rel=1e-9)


def test_sample_counts_at_half_wavelength():
    assert len(sample_curve(sigma1(), 0.2)) == 6
    assert len(sample_curve(sigma2(), 0.2)) == 6


def test_samples_sit_at_segment_midpoints():
    c = sigma1()
    samples = sample_curve(c, 0.2)
    m = len(samples)
    L = c.arc_length()
    for k, s in enumerate(samples):
        assert c.arc_length(s.parameter) == pytest.approx((k + 0.5) * L / m, abs=1e-9)
        np.testing.assert_allclose(s.point, c.position(s.parameter), atol=1e-14)


def test_frame_is_orthonormal_and_right_handed():
    for s in sample_curve(sigma2(), 0.1):
        assert np.linalg.norm(s.tangent) == pytest.approx(1)
        assert s.tangent @ s.normal == pytest.approx(0, abs=1e-15)
        assert s.tangent[0] * s.normal[1] - s.tangent[1] * s.normal[0] == pytest.approx(1)


@given(st.floats(0.01, 2.0), st.floats(-3, 3), st.floats(0.05, 0.5))
@settings(max_examples=50, deadline=None)
def test_straight_segment_length(half_width, slope, spacing):
    c = ParametricCurve((0.0, 1.0), (0.0, slope), (-half_width, half_width))
    L = 2 * half_width * math.hypot(1, slope)
    assert c.arc_length() == pytest.approx(L, rel=1e-10)
    assert len(sample_curve(c, spacing)) == max(1, math.ceil(L / spacing - 1e-9))


def test_parameter_at_length_inverts_arc_length():
    c = sigma2()
    for frac in (0.0, 0.3, 0.77, 1.0):
        t = c.parameter_at_length(frac * c.arc_length())
        assert c.arc_length(t) == pytest.approx(frac * c.arc_length(), abs=1e-9)


def test_degenerate_curve_raises():
    with pytest.raises(ValueError):
        sample_curve(ParametricCurve((0.3,), (0.1,), (0.0, 1.0)), 0.1)


def test_polarization_tensor_eigenpairs():
    s = CurveSample.from_tangent(np.zeros(2), [0.6, 0.8])
    M = polarization_tensor(s, 5.0)
    np.testing.assert_allclose(M @ s.tangent, 2 * (1 / 5 - 1) * s.tangent, atol=1e-14)
    np.testing.assert_allclose(M @ s.normal, 2 * (1 - 5) * s.normal, atol=1e-14)
    np.testing.assert_allclose(M, M.T)


def test_inclusion_validation():
    with pytest.raises(ValueError):
        ThinInclusion(sigma1(), 0.0, 5.0, 5.0)
    with pytest.raises(ValueError):
        ThinInclusion(sigma1(), 0.01, -1.0, 5.0)
    with pytest.warns(UserWarning):
        ThinInclusion(sigma1(), 0.01, 1.0, 1.0)


def test_thickness_warning():
    inc = ThinInclusion(sigma1(), 0.05, 5.0, 5.0)
    with pytest.warns(UserWarning):
        inc.check_thickness(0.4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ThinInclusion(sigma1(), 0.015, 5.0, 5.0).check_thickness(0.4)
