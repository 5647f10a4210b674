#!/usr/bin/env python3
"""
test_monodromy.py

Fundamental system, Lyapunov function and the drift operator.
"""

import numpy as np
import pytest

from monodromy import (HillOperator, IntegratorConfig, MonodromyError, as_operator, energy_batch,
                       integrate, integrate_batch, lyapunov_on_energy)
from potential import PeriodicPotential


def test_free_discriminant_is_cosine(zero):
    z = np.array([0.3, 2.5, 7.0, 19.0])
    batch = integrate_batch(zero, z)
    np.testing.assert_allclose(batch.delta, np.cos(z), atol=1e-10)
    np.testing.assert_allclose(batch.delta_z, -np.sin(z), atol=1e-9)


def test_free_discriminant_complex(zero):
    z = np.array([3.0 + 0.5j, 10.0 - 1.0j, 0.5 + 2.0j])
    batch = integrate_batch(zero, z)
    np.testing.assert_allclose(batch.delta, np.cos(z), atol=1e-10)


def test_free_solutions(zero):
    z = 4.0 + 0.25j
    sol = integrate(zero, z, n_store=9)
    x = sol.x_grid
    np.testing.assert_allclose(sol.theta, np.cos(z * x), atol=1e-11)
    np.testing.assert_allclose(sol.phi, np.sin(z * x) / z, atol=1e-11)
    assert sol.beta == pytest.approx(0.0, abs=1e-11)


def test_wronskian_is_conserved(mathieu):
    sol = integrate(mathieu, 5.0 + 1.0j, n_store=33)
    assert sol.wronskian_defect() <= 1e-10


def test_discriminant_is_even(mathieu):
    z = np.array([1.7, 4.2 + 0.3j])
    np.testing.assert_array_equal(integrate_batch(mathieu, z).delta, integrate_batch(mathieu, -z).delta)


def test_discriminant_is_even_on_random_points(mathieu):
    rng = np.random.default_rng(2024)
    z = rng.uniform(-30.0, 30.0, 100) + 1j * rng.uniform(-3.0, 3.0, 100)
    np.testing.assert_array_equal(integrate_batch(mathieu, z).delta, integrate_batch(mathieu, -z).delta)


def test_delta_z_matches_finite_difference(mathieu):
    z, h = 3.3, 1e-5
    d = integrate_batch(mathieu, np.array([z - h, z, z + h]))
    fd = (d.delta[2] - d.delta[0]) / (2 * h)
    assert d.delta_z[1] == pytest.approx(fd, abs=1e-6)


def test_single_and_batched_agree(mathieu):
    z = 6.1 + 0.4j
    single = integrate(mathieu, z)
    batch = integrate_batch(mathieu, np.array([z]))
    assert single.delta == pytest.approx(complex(batch.delta[0]), abs=1e-10)
    assert single.beta == pytest.approx(complex(batch.beta[0]), abs=1e-10)


def test_negative_energy_uses_energy_axis(zero):
    assert lyapunov_on_energy(zero, -1.0) == pytest.approx(np.cosh(1.0), rel=1e-10)
    assert lyapunov_on_energy(zero, 4.0) == pytest.approx(np.cos(2.0), abs=1e-10)
    batch = energy_batch(zero, [-4.0, 1.0])
    np.testing.assert_allclose(batch.delta.real, [np.cosh(2.0), np.cos(1.0)], rtol=1e-10)


def test_shifted_operator(mathieu):
    op = as_operator(mathieu).shifted(1.5)
    assert op.V(0.0) == pytest.approx(3.5)
    direct = integrate_batch(mathieu.shifted(1.5), np.array([2.0])).delta
    np.testing.assert_allclose(integrate_batch(op, np.array([2.0])).delta, direct, atol=1e-12)


def test_drift_operator_wronskian():
    q = PeriodicPotential(np.array([0.0, 0.5]), np.zeros(0), 256)
    op = HillOperator(PeriodicPotential.zero(256), drift=q, shift=0.3)
    sol = integrate(op, 4.0 + 0.5j, n_store=17)
    np.testing.assert_allclose(sol.wronskian_expected, np.exp(-2 * q.primitive(sol.x_grid)))
    assert sol.wronskian_defect() <= 1e-9


def test_drift_operator_is_equivalent_to_smooth():
    # y = exp(int q) u maps -u'' - 2qu' + (c - ||q||^2) u to -y'' + (c + q' + q^2 - ||q||^2) y
    q = PeriodicPotential(np.array([0.0, 0.5]), np.zeros(0), 256)
    c = 0.7
    op = HillOperator(PeriodicPotential.zero(256), drift=q, shift=c - q.l2_norm_sq())
    smooth = (q.derivative(1) + q.multiply(q)).shifted(c - q.l2_norm_sq())
    z = np.array([1.3, 5.0 + 0.2j])
    np.testing.assert_allclose(integrate_batch(op, z).delta, integrate_batch(smooth, z).delta, atol=1e-9)


def test_integrate_rejects_bad_input(mathieu):
    with pytest.raises(MonodromyError):
        integrate(mathieu, 1.0, n_store=1)
    with pytest.raises(MonodromyError):
        integrate_batch(mathieu, np.array([np.inf]))
    with pytest.raises(MonodromyError):
        as_operator("2cos")


def test_looser_tolerance_still_close(mathieu):
    loose = IntegratorConfig(rtol=1e-8, atol=1e-10, chunk_size=2)
    z = np.array([0.5, 1.5, 2.5])
    np.testing.assert_allclose(integrate_batch(mathieu, z, loose).delta,
                               integrate_batch(mathieu, z).delta, atol=1e-6)
