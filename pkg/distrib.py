#!/usr/bin/env python3
"""
distrib.py

Distributional potentials c + p' through the Riccati map p -> q.

- riccati_solve: periodic, mean-zero q with p' = q' + q^2 - ||q||^2 (Galerkin Newton).
- transformed_operator: -u'' - 2 q u' + (c - ||q||^2) u = z^2 u, unitarily
  equivalent to -y'' + (c + p') y through y = exp(int_0^x q) u.
- calibrate: the constant c putting the bottom of the spectrum at 0.
- verify_thm_4_1: k_0 = z - k bounds near and away from the gaps.
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from monodromy import HillOperator, IntegratorConfig, MonodromySolution, integrate
from potential import PeriodicPotential, PotentialError
from quasimomentum import (QuasimomentumMap, build_map, distance_to_gaps, fit_loglog, k_direct,
                           k_integral)
from spectrum import (BandStructure, SpectrumConfig, Y_n_max, comb_inequalities, comb_sum,
                      find_band_edges, ground_edge)


class DistribError(Exception):
    """Base exception for distributional-potential errors."""
    pass


class RiccatiConvergenceError(DistribError):
    """Raised when the Riccati Newton iteration does not converge; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """q solving the Riccati equation for the primitive p, with ||q||^2 and the constant c."""
    p: PeriodicPotential
    q: PeriodicPotential
    norm_q_sq: float
    c: Optional[float] = None
    residual: float = 0.0
    iterations: int = 0

    def residual_on_grid(self) -> np.ndarray:
        """p' - q' - q^2 + ||q||^2 on the grid."""
        qs = self.q.samples()
        return (self.p.derivative(1).samples() - self.q.derivative(1).samples()
                - qs * qs + self.norm_q_sq)


def primitive_from_descriptor(descriptor: Dict[str, Any], grid_size: int = 1024,
                              max_jet: int = 8) -> PeriodicPotential:
    """The primitive p of a {"type": "distribution", "p_cos": [...], "p_sin": [...]} descriptor."""
    if descriptor.get("type") != "distribution":
        raise DistribError(f"expected a distribution descriptor, got type {descriptor.get('type')!r}")
    try:
        p = PeriodicPotential(np.asarray(descriptor.get("p_cos", [0.0]), dtype=float),
                              np.asarray(descriptor.get("p_sin", []), dtype=float),
                              grid_size, max_jet)
    except (PotentialError, TypeError, ValueError) as e:
        logger.error(f"Malformed distribution descriptor: {e}")
        raise DistribError(f"Malformed distribution descriptor: {e}") from e
    if p.mean != 0.0:
        logger.warning(f"Dropping mean {p.mean:.6g} of the primitive p (p' is unchanged)")
        p = p.shifted(-p.mean)
    return p


def forward_map(q: PeriodicPotential) -> PeriodicPotential:
    """Mean-zero p with p' = q' + q^2 - ||q||^2 for mean-zero q."""
    if abs(q.mean) > 1e-12:
        raise DistribError(f"q must have zero mean, got {q.mean:.3g}")
    h = q.grid_size // 2 - 1
    square = PeriodicPotential.from_samples(q.samples() ** 2, max_harmonic=h, max_jet=q.max_jet)
    p = q + square.periodic_primitive()
    return p.shifted(-p.mean)


def _basis_matrix(h: int, x: np.ndarray):
    n = np.arange(1, h + 1)
    arg = 2 * np.pi * np.multiply.outer(x, n)
    w = 2 * np.pi * n
    return np.cos(arg), np.sin(arg), -w * np.sin(arg), w * np.cos(arg)


def _project(values: np.ndarray, h: int) -> np.ndarray:
    """Galerkin coefficients (mean, a_1..a_h, b_1..b_h) of grid values along axis 0."""
    n = values.shape[0]
    spec = np.fft.rfft(values, axis=0) / n
    return np.concatenate([spec[:1].real, 2.0 * spec[1:h + 1].real, -2.0 * spec[1:h + 1].imag], axis=0)


def riccati_solve(p: PeriodicPotential, tol: float = 1e-10, max_iter: int = 50,
                  harmonics: Optional[int] = None) -> RiccatiSolution:
    """
    Solve p' = q' + q^2 - mu for periodic mean-zero q, with mu = ||q||^2.

    Newton on the coefficients of q up to `harmonics` (default grid/8) and on
    mu; the residual is projected on the same trigonometric basis.

    Args:
        p: Primitive of the singular part.
        tol: Max grid residual accepted.
        max_iter: Newton iteration cap.
        harmonics: Highest harmonic of q.

    Returns:
        RiccatiSolution with c left unset.
    """
    if p.mean != 0.0:
        logger.warning(f"Dropping mean {p.mean:.6g} of p before the Riccati solve")
        p = p.shifted(-p.mean)
    grid = p.grid
    h = harmonics if harmonics is not None else p.grid_size // 8
    C, S, dC, dS = _basis_matrix(h, grid)
    dp = p.derivative(1).samples()

    a = np.zeros(h)
    b = np.zeros(h)
    a[:min(h, p.cos_coeffs.size - 1)] = p.cos_coeffs[1:h + 1]
    b[:min(h, p.sin_coeffs.size)] = p.sin_coeffs[:h]
    q = C @ a + S @ b
    mu = float(np.mean(q * q))
    residual = np.inf
    for it in range(1, max_iter + 1):
        dq = dC @ a + dS @ b
        R = dq + q * q - mu - dp
        residual = float(np.max(np.abs(R)))
        logger.debug(f"Riccati iteration {it}: residual {residual:.3e}")
        if residual <= tol:
            break
        J = np.empty((2 * h + 1, 2 * h + 1))
        J[:, :h] = _project(dC + 2.0 * q[:, None] * C, h)
        J[:, h:2 * h] = _project(dS + 2.0 * q[:, None] * S, h)
        J[:, 2 * h] = 0.0
        J[0, 2 * h] = -1.0
        try:
            step = np.linalg.solve(J, -_project(R, h))
        except np.linalg.LinAlgError as e:
            logger.error(f"Riccati Jacobian is singular: {e}")
            raise RiccatiConvergenceError(f"singular Riccati Jacobian: {e}", residual) from e
        a += step[:h]
        b += step[h:2 * h]
        mu += float(step[2 * h])
        q = C @ a + S @ b
    else:
        dq = dC @ a + dS @ b
        residual = float(np.max(np.abs(dq + q * q - mu - dp)))
        if residual > tol:
            logger.error(f"Riccati solve did not converge: residual {residual:.3e}")
            raise RiccatiConvergenceError(f"Riccati solve did not converge in {max_iter} iterations", residual)
    q_pot = PeriodicPotential(np.concatenate([[0.0], a]), b, p.grid_size, p.max_jet)
    return RiccatiSolution(p=p, q=q_pot, norm_q_sq=q_pot.l2_norm_sq(), residual=residual, iterations=it)


def transformed_operator(sol: RiccatiSolution, c: Optional[float] = None) -> HillOperator:
    """-u'' - 2 q u' + (c - ||q||^2) u; the smooth reference is c + p'."""
    c = sol.c if c is None else c
    if c is None:
        raise DistribError("the constant c is not set; calibrate first or pass c")
    zero = PeriodicPotential.zero(sol.p.grid_size, sol.p.max_jet)
    return HillOperator(potential=zero, drift=sol.q, shift=c - sol.norm_q_sq,
                        reference=sol.p.derivative(1).shifted(c))


def calibrate(sol: RiccatiSolution, integrator: Optional[IntegratorConfig] = None,
              config: Optional[SpectrumConfig] = None) -> RiccatiSolution:
    """Set c so that the lowest periodic eigenvalue of the transformed operator is 0."""
    E0 = ground_edge(transformed_operator(sol, 0.0), integrator, config)
    c = -E0
    logger.info(f"Calibrated c = {c:.12g} (||q||^2 = {sol.norm_q_sq:.12g}, difference {c - sol.norm_q_sq:.3g})")
    return replace(sol, c=c)


def monodromy_transformed(sol: RiccatiSolution, z: complex, n_store: int = 2,
                          integrator: Optional[IntegratorConfig] = None) -> MonodromySolution:
    return integrate(transformed_operator(sol), z, n_store=n_store, config=integrator)


def trace_identity(sol: RiccatiSolution, qmap: QuasimomentumMap, rel_tol: float = 0.01) -> Dict[str, object]:
    """P_{-1} = ||q||^2/2 against the comb Q_0 and the trace coefficient of the bands."""
    half = 0.5 * sol.norm_q_sq
    q0 = qmap.moments.Q[0]
    tail = qmap.tail_bound
    p_minus1 = qmap.bands.trace_coefficient(-1)
    scale = max(half, 1e-300)
    rel_q0 = abs(q0 - half) / scale if half else abs(q0)
    rel_p = abs(p_minus1 - half) / scale if half and p_minus1 is not None else None
    ok = rel_q0 <= rel_tol or (q0 <= half <= q0 + tail)
    return {"half_norm_q_sq": half, "Q0": q0, "Q0_tail": tail, "P_minus1": p_minus1,
            "rel_error_Q0": rel_q0, "rel_error_P_minus1": rel_p, "passed": bool(ok)}


@dataclass
class DistribCheckConfig:
    """Samples and tolerances for the k_0 suite."""
    eps: float = 0.1
    n_check: int = 10
    boundary_points: int = 48
    strip_height: float = 3.5
    y_min: float = 20.0
    y_max: float = 200.0
    n_y: int = 12
    p_minus1_rel: float = 0.05
    smooth_edge_tol: float = 1e-7
    comb_slack: float = 1e-9
    trace_rel: float = 0.01


def _stadium(e_minus: float, e_plus: float, eps: float, count: int) -> np.ndarray:
    """Upper half of {dist(z, [e_minus, e_plus]) = eps}; the lower half is its conjugate."""
    arc = max(count // 4, 2)
    left = e_minus + eps * np.exp(1j * np.linspace(np.pi, np.pi / 2, arc, endpoint=False))
    top = np.linspace(e_minus, e_plus, count - 2 * arc, endpoint=False) + 1j * eps
    right = e_plus + eps * np.exp(1j * np.linspace(np.pi / 2, 0.0, arc))
    return np.concatenate([left, top, right])


def _k0(qmap: QuasimomentumMap, z: np.ndarray) -> np.ndarray:
    return z - np.asarray(k_direct(qmap, z))


def _gap_rows(qmap: QuasimomentumMap, cfg: DistribCheckConfig) -> list:
    bands = qmap.bands
    M_tail = qmap.moments.M_tail
    rows = []
    for n in bands.resolved[:cfg.n_check]:
        n = int(n)
        i = n - 1
        em, ep = bands.e_minus[i], bands.e_plus[i]
        gap = ep - em
        table = bands.tables[i]
        rim = np.max(np.abs(table.nodes - np.pi * n - 1j * table.v))
        y0 = Y_n_max(bands, n)
        eps = min(cfg.eps, 0.5 * bands.s_min)
        ring = _stadium(em, ep, eps, cfg.boundary_points)
        ring_max = float(np.max(np.abs(_k0(qmap, ring))))
        tail_term = 2.0 * M_tail / (bands.s_min * max(bands.n_gaps + 1 - n, 1))
        s_eps = comb_sum(bands.M, bands.s_min, n, eps) + tail_term
        s_one = comb_sum(bands.M, bands.s_min, n, 1.0) + tail_term
        s_s = comb_sum(bands.M, bands.s_min, n, bands.s_min) + tail_term

        lo = 0.5 * (em + (bands.e_plus[i - 1] if n > 1 else bands.e0))
        hi = 0.5 * (ep + bands.e_minus[i + 1]) if n < bands.n_gaps else ep + 0.5 * bands.s_min
        r = cfg.strip_height
        edge = np.concatenate([np.linspace(lo, hi, 24) + 1j * r,
                               lo + 1j * np.linspace(0.0, r, 12), hi + 1j * np.linspace(0.0, r, 12)])
        edge = edge[distance_to_gaps(qmap, edge, include_tail=False) > eps]
        outer = float(np.max(np.abs(_k0(qmap, edge)))) if edge.size else 0.0
        xs, ys = np.meshgrid(np.linspace(lo, hi, 9)[1:-1], np.linspace(0.0, r, 6)[1:])
        inner = (xs + 1j * ys).ravel()
        inner = inner[distance_to_gaps(qmap, inner, include_tail=False) > eps]
        inside = float(np.max(np.abs(_k0(qmap, inner)))) if inner.size else 0.0

        rows.append({"n": n, "gap": gap, "Y0": y0,
                     "rim_max": float(rim), "rim_window": float(rim / gap - 1.0),
                     "boundary_max": ring_max, "S_eps": s_eps, "boundary_le_S_eps": ring_max <= s_eps + cfg.comb_slack,
                     "outer_max": outer, "S_1": s_one, "outer_le_S_1": outer <= s_one + cfg.comb_slack,
                     "inner_max": inside, "S_eps_plus_S_s": s_eps + s_s,
                     "inner_le_bound": inside <= s_eps + s_s + cfg.comb_slack})
    return rows


def summability(bands: BandStructure, r: float, Q0: float) -> Dict[str, float]:
    """sum_n S_n(r)^2 against 4 Q_0^2 (1/r^2 + 1/s^2)."""
    total = sum(comb_sum(bands.M, bands.s_min, n, r) ** 2 for n in range(1, bands.n_gaps + 1))
    bound = 4.0 * Q0 ** 2 * (1.0 / r ** 2 + 1.0 / bands.s_min ** 2)
    return {"sum_S_sq": float(total), "bound": float(bound), "passed": bool(total <= bound * (1 + 1e-12))}


def high_energy_fit(qmap: QuasimomentumMap, sol: RiccatiSolution, cfg: DistribCheckConfig) -> Dict[str, object]:
    """(k(iy) - iy) * iy -> -P_{-1} = -||q||^2/2 and |k(iy) - iy| ~ y^{-1}."""
    ys = np.geomspace(cfg.y_min, cfg.y_max, cfg.n_y)
    z = 1j * ys
    diff = k_integral(qmap, z).value - z
    target = 0.5 * sol.norm_q_sq
    if target == 0.0:
        return {"trivial": True, "max_abs": float(np.max(np.abs(diff))), "passed": bool(np.max(np.abs(diff)) <= 1e-12)}
    coeff = float((diff[-1] * z[-1]).real)
    rel = abs(coeff + target) / target
    slope = fit_loglog(ys, np.abs(diff))[0]
    return {"trivial": False, "coefficient": coeff, "expected": -target, "rel_error": rel, "slope": slope,
            "passed": bool(rel <= cfg.p_minus1_rel)}


def smooth_consistency(sol: RiccatiSolution, bands: BandStructure, n_edges: int = 10,
                       tol: float = 1e-7) -> Dict[str, object]:
    """Edges of the transformed pipeline against -y'' + (c + p') y computed directly."""
    n = min(n_edges, bands.n_gaps)
    direct = find_band_edges(sol.p.derivative(1).shifted(sol.c), n, normalize=True,
                             integrator=bands.integrator, config=bands.config)
    dm = np.abs(direct.e_minus - bands.e_minus[:n])
    dp = np.abs(direct.e_plus - bands.e_plus[:n])
    worst = float(max(np.max(dm), np.max(dp)))
    return {"edges_compared": 2 * n, "max_edge_difference": worst,
            "E0_difference": float(abs(direct.E0 - bands.E0)), "passed": bool(worst <= tol)}


def verify_thm_4_1(sol: RiccatiSolution, n_gaps: int, config: Optional[DistribCheckConfig] = None,
                   integrator: Optional[IntegratorConfig] = None,
                   spectrum_config: Optional[SpectrumConfig] = None) -> Dict[str, object]:
    """
    k_0 = z - k bounds for the transformed operator.

    Asserted: the ring bound by S_n(eps), the summability of S_n^2, the
    high-energy coefficient, the trace identity, smooth-case edge agreement and
    the comb inequalities. Rim windows and the two bounds away from U_n are
    reported only.
    """
    cfg = config or DistribCheckConfig()
    if sol.c is None:
        sol = calibrate(sol, integrator, spectrum_config)
    bands = find_band_edges(transformed_operator(sol), n_gaps, normalize=True,
                            integrator=integrator, config=spectrum_config)
    qmap = build_map(bands)
    residual = float(np.max(np.abs(sol.residual_on_grid())))
    report: Dict[str, object] = {
        "norm_q_sq": sol.norm_q_sq,
        "c": sol.c,
        "c_minus_norm_q_sq": sol.c - sol.norm_q_sq,
        "riccati": {"residual": residual, "iterations": sol.iterations,
                    "q_mean": sol.q.mean, "passed": bool(residual <= 1e-9)},
        "trace_identity": trace_identity(sol, qmap, cfg.trace_rel),
        "high_energy": high_energy_fit(qmap, sol, cfg),
        "comb": comb_inequalities(bands, cfg.comb_slack),
    }
    if bands.resolved.size:
        rows = _gap_rows(qmap, cfg)
        report["gaps"] = {"rows": rows, "passed": bool(all(r["boundary_le_S_eps"] for r in rows))}
        report["summability"] = summability(bands, min(cfg.eps, 0.5 * bands.s_min),
                                            qmap.moments.Q[0] + qmap.tail_bound)
    else:
        report["gaps"] = {"rows": [], "trivial": True, "passed": True}
        report["summability"] = {"trivial": True, "passed": True}
    report["smooth_consistency"] = smooth_consistency(sol, bands, cfg.n_check, cfg.smooth_edge_tol)
    names = ["riccati", "trace_identity", "high_energy", "comb", "gaps", "summability", "smooth_consistency"]
    report["failures"] = [n for n in names if not report[n]["passed"]]
    report["passed"] = not report["failures"]
    if report["failures"]:
        logger.warning(f"Distributional suite failures: {report['failures']}")
    return report
