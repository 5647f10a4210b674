#!/usr/bin/env python3
"""
bloch.py

Titchmarsh-Weyl functions M+-(z) and Bloch solutions Psi+-(x, z).

Psi+- = theta + M+- phi with M+- = (beta +- i sin k)/phi(1, z), so that
Psi+-(0) = 1, Psi+-'(0) = M+- and Psi+-(x + 1) = e^{+-ik} Psi+-(x).
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from diffalg import build_model
from monodromy import MonodromySolution, integrate
from quasimomentum import QuasimomentumMap, fit_loglog, k_direct
from spectrum import gap_mass_and_moments


class BlochError(Exception):
    """Base exception for Bloch and Weyl function errors."""
    pass


class DirichletPoleError(BlochError):
    """Raised when z is (numerically) a Dirichlet eigenvalue momentum."""

    def __init__(self, message: str, phi1: float):
        super().__init__(message)
        self.phi1 = phi1


POLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BlochEval:
    """Weyl functions and Bloch solutions at one momentum."""
    z: complex
    k: complex
    M_plus: complex
    M_minus: complex
    x_grid: np.ndarray
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    dpsi_plus: np.ndarray
    dpsi_minus: np.ndarray
    identity_defect: float


def _sin_k(delta: complex, k: complex) -> complex:
    """sin k from Delta, with the square-root sign taken from the branch of k."""
    s = complex(np.sqrt(1.0 - delta * delta + 0j))
    ref = np.sin(k)
    return s if abs(s - ref) <= abs(s + ref) else -s


def _weyl_from_solution(sol: MonodromySolution, k: complex) -> Tuple[complex, complex, complex]:
    phi1 = sol.phi[-1]
    if abs(phi1) < POLE_TOL:
        logger.error(f"Dirichlet pole at z = {sol.z}: |phi(1)| = {abs(phi1):.3g}")
        raise DirichletPoleError(f"z = {sol.z} is a Dirichlet eigenvalue momentum", abs(phi1))
    s = _sin_k(sol.delta, k)
    return (sol.beta + 1j * s) / phi1, (sol.beta - 1j * s) / phi1, s


def weyl_m(qmap: QuasimomentumMap, z: complex) -> Tuple[complex, complex]:
    """
    M+-(z) = (beta(z) +- i sin k(z)) / phi(1, z).

    Raises:
        DirichletPoleError: |phi(1, z)| below 1e-12.
    """
    bands = qmap.bands
    sol = integrate(bands.operator, z, config=bands.integrator)
    M_plus, M_minus, _ = _weyl_from_solution(sol, complex(k_direct(qmap, z)))
    return M_plus, M_minus


def bloch_psi(qmap: QuasimomentumMap, z: complex, n_store: int = 65) -> BlochEval:
    """Psi+-(x, z) on n_store uniform points of [0, 1] with the endpoint identities checked."""
    bands = qmap.bands
    sol = integrate(bands.operator, z, n_store=n_store, config=bands.integrator)
    k = complex(k_direct(qmap, z))
    M_plus, M_minus, s = _weyl_from_solution(sol, k)
    psi_p = sol.theta + M_plus * sol.phi
    psi_m = sol.theta + M_minus * sol.phi
    dpsi_p = sol.theta_prime + M_plus * sol.phi_prime
    dpsi_m = sol.theta_prime + M_minus * sol.phi_prime
    e_plus, e_minus = sol.delta + 1j * s, sol.delta - 1j * s
    scale = max(1.0, abs(M_plus), abs(M_minus))
    defect = max(abs(psi_p[0] - 1.0), abs(psi_m[0] - 1.0),
                 abs(dpsi_p[0] - M_plus) / scale, abs(dpsi_m[0] - M_minus) / scale,
                 abs(psi_p[-1] - e_plus), abs(psi_m[-1] - e_minus),
                 abs(dpsi_p[-1] - e_plus * M_plus) / scale, abs(dpsi_m[-1] - e_minus * M_minus) / scale)
    if defect > 1e-8:
        logger.warning(f"Bloch identities off by {defect:.3g} at z = {z}")
    return BlochEval(z=complex(z), k=k, M_plus=M_plus, M_minus=M_minus, x_grid=sol.x_grid,
                     psi_plus=psi_p, psi_minus=psi_m, dpsi_plus=dpsi_p, dpsi_minus=dpsi_m,
                     identity_defect=float(defect))


def weyl_identities(qmap: QuasimomentumMap, z: complex) -> Dict[str, float]:
    """Residuals of M+ + M- = 2 beta/phi(1) and M+ - M- = 2i sin k/phi(1)."""
    bands = qmap.bands
    sol = integrate(bands.operator, z, config=bands.integrator)
    M_plus, M_minus, s = _weyl_from_solution(sol, complex(k_direct(qmap, z)))
    phi1 = sol.phi[-1]
    scale = max(1.0, abs(M_plus), abs(M_minus))
    return {"sum": float(abs(M_plus + M_minus - 2 * sol.beta / phi1) / scale),
            "difference": float(abs(M_plus - M_minus - 2j * s / phi1) / scale)}


def _model(qmap: QuasimomentumMap, m: int):
    tp = qmap.bands.operator.trace_potential()
    if tp is None:
        raise BlochError("operator carries no smooth potential for the high-energy model")
    return build_model(tp, m)


def fundamental_asymptotics(qmap: QuasimomentumMap, m: int,
                            zs: Sequence[complex] = (50 + 0.5j, 100 + 0.5j, 200 + 0.5j)) -> Dict[str, object]:
    """
    Period-end values against the order-m model with xi = xi_m(1, z):
    Delta ~ cos xi, phi(1) ~ sin xi/omega, theta(1) ~ cos xi - (tau/omega) sin xi,
    phi'(1) ~ cos xi + (tau/omega) sin xi, beta ~ (tau/omega) sin xi.
    """
    model = _model(qmap, m)
    bands = qmap.bands
    rows = []
    for z in zs:
        sol = integrate(bands.operator, z, config=bands.integrator)
        xi = complex(model.xi(1.0, z))
        om, ta = complex(model.omega(z)), complex(model.tau(z))
        c, s = np.cos(xi), np.sin(xi)
        rows.append({"z": [float(np.real(z)), float(np.imag(z))],
                     "abs_phi1": float(abs(sol.phi[-1])),
                     "delta": float(abs(sol.delta - c)),
                     "phi1": float(abs(sol.phi[-1] - s / om)),
                     "theta1": float(abs(sol.theta[-1] - c + ta / om * s)),
                     "phi1_prime": float(abs(sol.phi_prime[-1] - c - ta / om * s)),
                     "beta": float(abs(sol.beta - ta / om * s))})
    absz = np.abs(np.asarray(zs))
    slopes = {}
    for key in ("abs_phi1", "delta", "phi1", "theta1", "phi1_prime", "beta"):
        vals = np.array([r[key] for r in rows])
        slopes[key] = fit_loglog(absz, vals)[0] if np.all(vals > 0) else None
    return {"m": m, "rows": rows, "slopes": slopes}


def moment_identities(qmap: QuasimomentumMap, m: int, rel_tol: float = 0.01,
                      abs_floor: float = 1e-12) -> Dict[str, object]:
    """
    Period integrals of the kappa_j against the comb: even-index ones vanish,
    odd ones reproduce P_{j-1} = Q_{2j} (finite gaps plus tail).

    The rows j = 1, 3, 5 are always checked, so P_1 = Q_4 is covered for any m.
    Discrepancies below abs_floor * max(1, ||p||^2) count as round-off.
    """
    if not qmap.bands.normalized:
        raise BlochError("moment identities need the normalized band structure")
    model = _model(qmap, max(2 * m + 1, 5))
    moments = gap_mass_and_moments(qmap.bands, max(2 * m, 4))
    floor = abs_floor * max(1.0, qmap.bands.operator.trace_potential().l2_norm_sq())
    rows = []
    ok = True
    for j, integral in enumerate(model.kappa_int, start=1):
        if j % 2 == 0:
            rows.append({"j": j, "kappa_integral": integral, "vanishes": abs(integral) <= 1e-9})
            ok = ok and abs(integral) <= 1e-9
            continue
        i = (j - 1) // 2
        P = (-1) ** i * integral / 2 ** (2 * i + 1)
        if 2 * i >= len(moments.Q):
            continue
        Q = moments.Q[2 * i]
        tail = moments.Q_tail[2 * i]
        scale = max(abs(P), 1e-300)
        rel = abs(P - Q) / scale if P else abs(Q)
        slack = (tail if np.isfinite(tail) else 0.0) + floor
        within = (rel <= rel_tol or abs(P - Q) <= slack
                  or (np.isfinite(tail) and Q <= P <= Q + tail + rel_tol * scale))
        rows.append({"j": j, "P": P, "Q": Q, "Q_tail": tail, "rel_discrepancy": rel,
                     "abs_discrepancy": abs(P - Q), "passed": bool(within)})
        ok = ok and within
    return {"rows": rows, "passed": bool(ok)}


@dataclass
class BlochCheckConfig:
    """Samples and windows for the Bloch asymptotics suite."""
    re_min: float = 10.0
    re_max: float = 200.0
    n_points: int = 12
    im: float = 0.5
    slope_window: float = 0.3
    identity_tol: float = 1e-8
    n_store: int = 33
    trivial_tol: float = 1e-10


def _slope_check(x, err, bound: float, window: float, trivial_tol: float) -> Dict[str, object]:
    err = np.asarray(err, dtype=float)
    if np.all(err <= trivial_tol):
        return {"trivial": True, "max_error": float(np.max(err)), "bound": bound, "passed": True}
    slope = fit_loglog(x, np.maximum(err, 1e-300))[0]
    return {"trivial": False, "slope": slope, "bound": bound, "max_error": float(np.max(err)),
            "passed": bool(slope <= bound + window)}


def verify_thm_1_2(qmap: QuasimomentumMap, m: int, config: Optional[BlochCheckConfig] = None,
                   normalized: Optional[QuasimomentumMap] = None) -> Dict[str, object]:
    """
    Bloch asymptotics suite of order m on z = x + i*im, x in [re_min, re_max].

    qmap may be unnormalized; the k - xi_m(1, z) and moment checks run on
    `normalized` (or on qmap itself when it is normalized).
    """
    cfg = config or BlochCheckConfig()
    if m < 0:
        raise BlochError(f"m must be non-negative, got {m}")
    logger.info(f"Verifying Bloch asymptotics for m = {m}")
    model = _model(qmap, m)
    xs = np.geomspace(cfg.re_min, cfg.re_max, cfg.n_points)
    zs = xs + 1j * cfg.im
    m_err = {"plus": [], "minus": []}
    psi_err = {"plus": [], "minus": []}
    defects = []
    identity = []
    for z in zs:
        ev = bloch_psi(qmap, z, n_store=cfg.n_store)
        defects.append(ev.identity_defect)
        ident = weyl_identities(qmap, z)
        identity.append(max(ident.values()))
        m_err["plus"].append(abs(ev.M_plus - complex(model.rho(z))))
        m_err["minus"].append(abs(ev.M_minus - complex(model.rho(-z))))
        psi_err["plus"].append(np.max(np.abs(ev.psi_plus - np.exp(1j * model.xi(ev.x_grid, z)))))
        psi_err["minus"].append(np.max(np.abs(ev.psi_minus - np.exp(1j * model.xi(ev.x_grid, -z)))))
    absz = np.abs(zs)
    report = {
        "m": m,
        "z": [[float(z.real), float(z.imag)] for z in zs],
        "identities": {"max_defect": float(max(defects)), "max_weyl_residual": float(max(identity)),
                       "passed": bool(max(defects) <= cfg.identity_tol and max(identity) <= cfg.identity_tol)},
        "M_plus": _slope_check(absz, m_err["plus"], 1 - m, cfg.slope_window, cfg.trivial_tol),
        "M_minus": _slope_check(absz, m_err["minus"], 1 - m, cfg.slope_window, cfg.trivial_tol),
        "psi_plus": _slope_check(absz, psi_err["plus"], -m, cfg.slope_window, cfg.trivial_tol),
        "psi_minus": _slope_check(absz, psi_err["minus"], -m, cfg.slope_window, cfg.trivial_tol),
        "fundamental": fundamental_asymptotics(qmap, m),
    }
    norm = normalized if normalized is not None else (qmap if qmap.bands.normalized else None)
    names = ["identities", "M_plus", "M_minus", "psi_plus", "psi_minus"]
    if norm is not None:
        nmodel = _model(norm, m)
        k = np.asarray(k_direct(norm, zs))
        k_err = np.abs(k - np.array([complex(nmodel.xi(1.0, z)) for z in zs]))
        report["k_vs_xi"] = _slope_check(absz, k_err, -m, cfg.slope_window, cfg.trivial_tol)
        report["moments"] = moment_identities(norm, m)
        names += ["k_vs_xi", "moments"]
    else:
        logger.warning("No normalized band structure given; k - xi and moment checks skipped")
    report["failures"] = [n for n in names if not report[n]["passed"]]
    report["passed"] = not report["failures"]
    return report
