#!/usr/bin/env python3
"""
test_spectrum.py

Band edges, comb heights, gap tables and the comb sums.
"""

import numpy as np
import pytest

from monodromy import integrate_batch
from potential import PeriodicPotential
from spectrum import (GapDomainError, SpectrumError, Y_n_function, Y_n_max, comb_inequalities, comb_sum,
                      find_band_edges, gap_height, gap_mass_and_moments, ground_edge, moment_tail,
                      v_model, v_on_gap, y_integral)


def test_free_operator_has_only_degenerate_gaps(zero_bands):
    assert zero_bands.E0 == pytest.approx(0.0, abs=1e-10)
    assert np.all(zero_bands.degenerate)
    np.testing.assert_allclose(zero_bands.e_max, np.pi * np.arange(1, 5), atol=1e-9)
    assert np.all(zero_bands.h == 0.0)
    assert np.all(zero_bands.M == 0.0)
    assert zero_bands.resolved.size == 0
    assert zero_bands.s_min == pytest.approx(np.pi, abs=1e-8)


def test_gap_height_of_degenerate_gap(zero_bands):
    e, h = gap_height(zero_bands, 2)
    assert e == pytest.approx(2 * np.pi, abs=1e-9)
    assert h == 0.0


def test_ground_edge_of_constant():
    assert ground_edge(PeriodicPotential.constant(-0.75, 64)) == pytest.approx(-0.75, abs=1e-10)


def test_ground_edge_of_free_operator_is_exactly_zero():
    assert ground_edge(PeriodicPotential.zero(64)) == 0.0


def test_free_bands_have_no_gap_mass(zero_bands):
    assert zero_bands.E0 == 0.0
    moments = gap_mass_and_moments(zero_bands, 4)
    assert moments.Q[0] == 0.0
    assert zero_bands.trace_coefficient(-1) == 0.0


def test_mathieu_edges_interlace(mathieu_bands):
    b = mathieu_bands
    assert b.normalized
    assert b.E0 < 0.0
    chain = np.concatenate([[0.0], np.column_stack([b.e_minus, b.e_plus]).ravel()])
    assert np.all(np.diff(chain) >= 0.0)
    assert np.all((b.e_minus <= b.e_max) & (b.e_max <= b.e_plus))
    assert 1 in b.resolved


def test_mathieu_first_gap_length(mathieu_bands):
    # first-order gap length 2|p_1| with p_1 = 1 the exponential Fourier coefficient
    assert mathieu_bands.gamma_lengths[0] == pytest.approx(2.0, rel=1e-3)


def test_edges_are_periodic_and_antiperiodic(mathieu_bands):
    b = mathieu_bands
    live = ~b.degenerate
    n = np.arange(1, b.n_gaps + 1)[live]
    for edges in (b.e_minus[live], b.e_plus[live]):
        delta = integrate_batch(b.operator, edges).delta.real
        np.testing.assert_allclose(delta, (-1.0) ** n, atol=1e-9)


def test_heights_match_extremal_discriminant(mathieu_bands):
    b = mathieu_bands
    live = ~b.degenerate
    delta = integrate_batch(b.operator, b.e_max[live]).delta.real
    np.testing.assert_allclose(np.cosh(b.h[live]), np.abs(delta), rtol=1e-10)


def test_gap_length_bounded_by_twice_height(sharp_bands):
    b = sharp_bands
    live = ~b.degenerate
    assert np.all(b.gap_lengths[live] <= 2 * b.h[live] + 1e-9)


def test_sharp_potential_resolves_six_gaps(sharp_bands):
    assert set(range(1, 7)) <= set(int(n) for n in sharp_bands.resolved)


def test_v_on_gap_vanishes_at_edges(mathieu_bands):
    b = mathieu_bands
    t = np.array([b.e_minus[0], b.e_max[0], b.e_plus[0]])
    v = v_on_gap(b, 1, t)
    assert v[0] == 0.0 and v[2] == 0.0
    assert v[1] == pytest.approx(b.h[0], rel=1e-9)


def test_v_on_gap_rejects_outside_points(mathieu_bands):
    with pytest.raises(GapDomainError):
        v_on_gap(mathieu_bands, 1, mathieu_bands.e_plus[0] + 0.1)
    with pytest.raises(SpectrumError):
        v_on_gap(mathieu_bands, 99, 1.0)


def test_v_model_is_close_to_v_on_a_small_gap(sharp_bands):
    b = sharp_bands
    n = 6
    t = b.e_minus[n - 1] + np.array([0.25, 0.5, 0.75]) * b.gap_lengths[n - 1]
    np.testing.assert_allclose(v_on_gap(b, n, t), v_model(b, n, t), rtol=0.2)


def test_gap_masses_are_positive(mathieu_bands):
    b = mathieu_bands
    live = ~b.degenerate
    assert np.all(b.M[live] > 0.0)
    table = b.tables[0]
    assert table.mass == pytest.approx(b.M[0])
    assert table.center == pytest.approx(0.5 * (b.e_minus[0] + b.e_plus[0]))


def test_odd_moments_vanish_and_tails_are_finite(mathieu_bands):
    moments = gap_mass_and_moments(mathieu_bands, 4)
    assert moments.Q[1] == 0.0 and moments.Q[3] == 0.0
    assert moments.Q[0] > 0.0
    assert all(np.isfinite(t) and t >= 0.0 for t in moments.Q_tail)
    assert moment_tail(mathieu_bands, 1) == 0.0


def test_zeroth_moment_matches_trace_coefficient(mathieu_bands):
    moments = gap_mass_and_moments(mathieu_bands, 2)
    P_minus1 = mathieu_bands.trace_coefficient(-1)
    assert P_minus1 == pytest.approx(-0.5 * mathieu_bands.E0)
    assert moments.Q[0] == pytest.approx(P_minus1, rel=0.01)


def test_comb_sum_synthetic_example():
    assert comb_sum([1.0, 0.0, 0.0], s=1.0, n=2, r=1.0) == pytest.approx(4.0 / 3.0)
    with pytest.raises(SpectrumError):
        comb_sum([1.0], s=1.0, n=1, r=0.0)


def test_single_gap_comb_has_zero_Y():
    nodes = np.array([1.0, 1.5, 2.0])
    assert np.all(y_integral([], 1.0, 2.0, nodes) == 0.0)


def test_Y_function_routes_agree(mathieu_bands):
    b = mathieu_bands
    t = b.e_minus[0] + np.array([0.3, 0.5, 0.7]) * b.gap_lengths[0]
    y_dir, y_int = Y_n_function(b, 1, t)
    np.testing.assert_allclose(y_dir, y_int, atol=1e-3)
    assert Y_n_max(b, 1) >= 0.0


def test_Y_function_at_the_gap_top(mathieu_bands):
    b = mathieu_bands
    y_dir, y_int = Y_n_function(b, 1, b.e_max[0])
    np.testing.assert_allclose(y_dir, y_int, atol=1e-4)


def test_comb_inequalities_hold(sharp_bands):
    report = comb_inequalities(sharp_bands)
    assert report["passed"]
    assert report["h_inf_sq_le_2Q0"]
    assert all(row["gap_le_2h"] for row in report["rows"])


def test_unnormalized_bands_keep_the_energy_scale(mathieu_raw_bands, mathieu_bands):
    raw, norm = mathieu_raw_bands, mathieu_bands
    assert not raw.normalized
    np.testing.assert_allclose(raw.E_minus[:2] - raw.E0, norm.E_minus[:2], rtol=1e-9)


def test_rejects_zero_gaps(mathieu):
    with pytest.raises(SpectrumError):
        find_band_edges(mathieu, 0)
