#!/usr/bin/env python3
"""
test_potential.py

Evaluation, calculus and descriptors of PeriodicPotential.
"""

import numpy as np
import pytest

from potential import JetOrderError, PeriodicPotential, PotentialError, period_integral


def fourier(cos, sin=(), grid_size=256):
    return PeriodicPotential(np.asarray(cos, dtype=float), np.asarray(sin, dtype=float), grid_size)


def test_eval_zero_potential(zero):
    assert zero.eval(0.37) == 0.0


def test_eval_cosine_at_origin(mathieu):
    assert mathieu.eval(0.0) == pytest.approx(2.0)


def test_eval_mixed_series():
    p = fourier([0.0, 2.0], [0.0, 1.0])
    assert p.eval(0.125) == pytest.approx(np.sqrt(2.0) + 1.0, rel=1e-14)


def test_eval_is_periodic():
    p = fourier([0.3, 1.0, -0.5], [0.2, 0.7])
    x = np.linspace(-0.9, 0.9, 11)
    np.testing.assert_allclose(p.eval(x), p.eval(x + 1.0), atol=1e-12)


def test_first_derivative_of_cosine():
    p = fourier([0.0, 1.0])
    x = np.linspace(0.0, 1.0, 17)
    np.testing.assert_allclose(p.derivative(1).eval(x), -2 * np.pi * np.sin(2 * np.pi * x), atol=1e-12)


def test_derivative_order_zero_is_identity():
    p = fourier([0.1, 1.0, 0.5], [0.3])
    d = p.derivative(0)
    x = np.linspace(0.0, 1.0, 9)
    np.testing.assert_allclose(d.eval(x), p.eval(x), atol=1e-14)


def test_second_derivative_against_finite_differences():
    p = fourier([0.0], [0.0, 1.0])
    rng = np.random.default_rng(7)
    x = rng.uniform(0.0, 1.0, 10)
    h = 1e-4
    fd = (p.eval(x + h) - 2 * p.eval(x) + p.eval(x - h)) / h ** 2
    exact = p.derivative(2).eval(x)
    np.testing.assert_allclose(exact, -16 * np.pi ** 2 * np.sin(4 * np.pi * x), atol=1e-9)
    np.testing.assert_allclose(fd, exact, rtol=1e-5, atol=1e-3)


def test_derivative_beyond_jet_budget_raises():
    p = PeriodicPotential(np.array([0.0, 1.0]), np.zeros(0), 256, max_jet=2)
    with pytest.raises(JetOrderError):
        p.derivative(3)


@pytest.mark.parametrize("h, bound", [(1e-3, 1e-3), (1e-4, 1e-5)])
def test_central_difference_converges(h, bound):
    p = fourier([0.0, 2.0], [0.0, 1.0])
    x = np.linspace(0.05, 0.95, 13)
    fd = (p.eval(x + h) - p.eval(x - h)) / (2 * h)
    assert np.max(np.abs(fd - p.derivative(1).eval(x))) <= bound


def test_period_integral_examples():
    x = np.arange(256) / 256
    assert period_integral(np.ones(256)) == pytest.approx(1.0)
    assert period_integral(np.cos(2 * np.pi * x) ** 2) == pytest.approx(0.5, abs=1e-15)
    assert period_integral(np.cos(2 * np.pi * x)) == pytest.approx(0.0, abs=1e-15)


def test_period_integral_rejects_empty():
    with pytest.raises(PotentialError):
        period_integral([])


def test_derivatives_integrate_to_zero():
    p = fourier([0.4, 1.0, -0.3, 0.2], [0.5, 0.1])
    for j in range(1, 5):
        assert abs(period_integral(p.derivative(j).samples())) <= 1e-12 * (2 * np.pi * 3) ** j


def test_primitive_of_shifted_cosine():
    p = fourier([1.0, 1.0])
    x = np.array([0.0, 0.2, 0.5, 0.9])
    np.testing.assert_allclose(p.primitive(x), x + np.sin(2 * np.pi * x) / (2 * np.pi), atol=1e-14)


def test_periodic_primitive_vanishes_at_origin():
    p = fourier([0.7], [1.0, 0.5])
    prim = p.periodic_primitive()
    assert prim.eval(0.0) == pytest.approx(0.0, abs=1e-15)
    x = np.linspace(0.1, 0.9, 5)
    np.testing.assert_allclose(prim.derivative(1).eval(x), p.eval(x) - p.mean, atol=1e-12)


def test_translated_shifts_the_argument():
    p = fourier([0.0, 1.0, 0.5], [0.25])
    x = np.linspace(0.0, 1.0, 7)
    np.testing.assert_allclose(p.translated(0.25).eval(x), p.eval(x + 0.25), atol=1e-13)


def test_multiply_squares_a_cosine():
    p = fourier([0.0, 1.0])
    sq = p.multiply(p)
    assert sq.mean == pytest.approx(0.5)
    assert sq.cos_coeffs[2] == pytest.approx(0.5)


def test_l2_norm_and_max_abs(mathieu):
    assert mathieu.l2_norm_sq() == pytest.approx(2.0)
    assert mathieu.max_abs() == pytest.approx(2.0)


def test_shift_scale_add_sub():
    p = fourier([0.0, 1.0])
    q = fourier([0.5], [2.0])
    total = p.scaled(2.0) + q - p
    x = np.linspace(0.0, 1.0, 5)
    np.testing.assert_allclose(total.eval(x), p.eval(x) + q.eval(x), atol=1e-14)
    assert p.shifted(3.0).mean == pytest.approx(3.0)


def test_from_samples_recovers_coefficients():
    p = fourier([0.25, 2.0, 0.0, -0.5], [0.0, 1.0])
    back = PeriodicPotential.from_samples(p.samples())
    np.testing.assert_allclose(back.cos_coeffs[:4], p.cos_coeffs, atol=1e-13)
    np.testing.assert_allclose(back.sin_coeffs[:2], p.sin_coeffs, atol=1e-13)


def test_from_samples_rejects_non_power_of_two():
    with pytest.raises(PotentialError):
        PeriodicPotential.from_samples(np.zeros(100))


def test_descriptor_round_trip():
    p = fourier([0.1, 2.0], [0.3])
    back = PeriodicPotential.from_descriptor(p.to_descriptor(), 256)
    np.testing.assert_allclose(back.cos_coeffs, p.cos_coeffs)
    np.testing.assert_allclose(back.sin_coeffs, p.sin_coeffs)


def test_samples_descriptor():
    x = np.arange(64) / 64
    p = PeriodicPotential.from_descriptor({"type": "samples", "values": list(np.cos(2 * np.pi * x))}, 64)
    assert p.cos_coeffs[1] == pytest.approx(1.0)
    assert p.grid_size == 64


@pytest.mark.parametrize("descriptor", [
    {"type": "wavelet"},
    {"type": "samples"},
    {"type": "fourier", "cos": ["a"]},
    "not a mapping",
])
def test_bad_descriptors_raise(descriptor):
    with pytest.raises(PotentialError):
        PeriodicPotential.from_descriptor(descriptor)


def test_invalid_construction():
    with pytest.raises(PotentialError):
        PeriodicPotential(np.array([0.0, 1.0]), np.zeros(0), 100)
    with pytest.raises(PotentialError):
        PeriodicPotential(np.array([0.0, 1.0 + 1.0j]))
    with pytest.raises(PotentialError):
        PeriodicPotential(np.array([np.nan]))


def test_sobolev_norms_of_a_cosine(mathieu):
    assert mathieu.sobolev_norm_sq(0) == pytest.approx(2.0)
    assert mathieu.sobolev_norm_sq(1) == pytest.approx(2.0 * (2 * np.pi) ** 2)
    assert mathieu.sobolev_norm_sq(2) == pytest.approx(mathieu.derivative(2).l2_norm_sq())
    with pytest.raises(PotentialError):
        mathieu.sobolev_norm_sq(-1)


def test_rough_samples_are_not_resolved_in_high_order():
    x = np.arange(256) / 256
    square_wave = PeriodicPotential.from_samples(np.sign(np.sin(2 * np.pi * x)))
    assert square_wave.in_sobolev(0)
    assert not square_wave.in_sobolev(2)
    assert fourier([0.0, 1.0, 0.5]).in_sobolev(4)
