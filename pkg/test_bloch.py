#!/usr/bin/env python3
"""
test_bloch.py

Weyl functions, Bloch solutions and the Bloch asymptotics suite.
"""

from types import SimpleNamespace

import numpy as np
import pytest

import bloch
from bloch import (BlochCheckConfig, BlochError, DirichletPoleError, bloch_psi, fundamental_asymptotics,
                   moment_identities, verify_thm_1_2, weyl_identities, weyl_m)
from quasimomentum import build_map, sample_domain


def test_free_weyl_functions(zero_map):
    z = 3.0 + 0.5j
    M_plus, M_minus = weyl_m(zero_map, z)
    assert M_plus == pytest.approx(1j * z, abs=1e-8)
    assert M_minus == pytest.approx(-1j * z, abs=1e-8)


def test_free_bloch_solutions_are_exponentials(zero_map):
    z = 5.0 + 0.25j
    ev = bloch_psi(zero_map, z, n_store=17)
    np.testing.assert_allclose(ev.psi_plus, np.exp(1j * z * ev.x_grid), atol=1e-8)
    np.testing.assert_allclose(ev.psi_minus, np.exp(-1j * z * ev.x_grid), atol=1e-8)
    assert ev.identity_defect <= 1e-8


def test_bloch_identities_on_mathieu(mathieu_map):
    ev = bloch_psi(mathieu_map, 7.5 + 0.5j)
    assert ev.identity_defect <= 1e-8
    assert ev.psi_plus[0] == pytest.approx(1.0, abs=1e-12)
    residuals = weyl_identities(mathieu_map, 7.5 + 0.5j)
    assert residuals["sum"] <= 1e-10
    assert residuals["difference"] <= 1e-10


def test_dirichlet_pole_is_reported(zero_map, monkeypatch):
    fake = SimpleNamespace(z=3.0 + 0.1j, phi=np.array([0.0, 1e-14]), delta=1.0, beta=0.0)
    monkeypatch.setattr(bloch, "integrate", lambda *args, **kwargs: fake)
    with pytest.raises(DirichletPoleError) as err:
        weyl_m(zero_map, 3.0 + 0.1j)
    assert err.value.phi1 == pytest.approx(1e-14)


def test_fundamental_asymptotics_for_free_operator(zero_map):
    report = fundamental_asymptotics(zero_map, 1)
    assert len(report["rows"]) == 3
    for row in report["rows"]:
        assert row["delta"] <= 1e-6
        assert row["beta"] <= 1e-6


def test_moment_identities_on_mathieu(mathieu_map):
    report = moment_identities(mathieu_map, 1)
    rows = {row["j"]: row for row in report["rows"]}
    assert rows[1]["passed"]
    assert rows[2]["vanishes"]
    assert rows[3]["passed"]
    assert rows[5]["passed"]
    assert rows[4]["vanishes"]


def test_moment_identities_cover_Q4_at_order_zero(mathieu_map):
    rows = {row["j"]: row for row in moment_identities(mathieu_map, 0)["rows"]}
    assert sorted(r for r in rows if r % 2) == [1, 3, 5]
    assert rows[5]["passed"]
    assert rows[5]["P"] > 0.0


def test_moment_identities_on_free_operator(zero_map):
    report = moment_identities(zero_map, 1)
    assert report["passed"]
    for row in report["rows"]:
        if row["j"] % 2:
            assert row["P"] == 0.0
            assert row["Q"] == 0.0


def test_moment_identities_need_normalized_bands(mathieu_raw_bands):
    with pytest.raises(BlochError):
        moment_identities(build_map(mathieu_raw_bands), 1)


def test_negative_order_is_rejected(mathieu_map):
    with pytest.raises(BlochError):
        verify_thm_1_2(mathieu_map, -1)


@pytest.mark.slow
def test_bloch_suite_on_unnormalized_mathieu(mathieu_raw_bands, mathieu_map):
    config = BlochCheckConfig(n_points=6, re_max=100.0)
    report = verify_thm_1_2(build_map(mathieu_raw_bands), 1, config, normalized=mathieu_map)
    assert report["identities"]["passed"]
    assert "k_vs_xi" in report
    assert report["M_plus"]["passed"]
    assert report["psi_plus"]["passed"]


@pytest.mark.slow
def test_bloch_identities_on_sampled_points(mathieu_map):
    zs = sample_domain(mathieu_map, 100, 30.0, 3.0, 0.1, seed=7)
    for z in zs:
        assert bloch_psi(mathieu_map, z, n_store=9).identity_defect <= 1e-8
        residuals = weyl_identities(mathieu_map, z)
        assert residuals["sum"] <= 1e-9
        assert residuals["difference"] <= 1e-9


@pytest.mark.slow
def test_bloch_suite_at_order_two(mathieu_raw_bands, mathieu_map):
    config = BlochCheckConfig(n_points=6, re_max=100.0)
    report = verify_thm_1_2(build_map(mathieu_raw_bands), 2, config, normalized=mathieu_map)
    assert report["identities"]["passed"]
    assert report["M_plus"]["passed"]
    assert report["psi_plus"]["passed"]
    assert report["moments"]["passed"]
