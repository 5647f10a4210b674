#!/usr/bin/env python3
"""
monodromy.py

Fundamental system of the Hill equation over one period.

Integrates y'' = a(x) y' + (V(x) - E) y for the solutions theta (theta(0)=1,
theta'(0)=0) and phi (phi(0)=0, phi'(0)=1) together with their energy
derivatives, for many momenta z (E = z^2) at once. The smooth operator has
a = 0, V = p; the gauge-transformed distributional operator has a = -2q.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp

from potential import PeriodicPotential

N_STATE = 8  # theta, theta', phi, phi' and their d/dE


class MonodromyError(Exception):
    """Base exception for monodromy integration errors."""
    pass


class IntegrationError(MonodromyError):
    """Raised when the adaptive integrator fails; carries solver diagnostics."""

    def __init__(self, message: str, z=None, nfev: int = 0):
        super().__init__(message)
        self.z = z
        self.nfev = nfev


@dataclass
class IntegratorConfig:
    """Configuration for the batched Runge-Kutta integration."""
    rtol: float = 1e-12
    atol: float = 1e-14
    phase_cap: float = 0.5       # max_step * local wavenumber
    chunk_size: int = 64         # momenta per vector ODE
    method: str = "DOP853"
    min_rtol: float = 2.5e-14    # solve_ivp floor is 100 * machine epsilon


@dataclass(frozen=True, eq=False)
class HillOperator:
    """
    -y'' - 2 q y' + (V + shift) y = E y on one period.

    reference is a smooth potential with the same discriminant; it feeds the
    trace coefficients when a drift term is present.
    """
    potential: PeriodicPotential
    drift: Optional[PeriodicPotential] = None
    shift: float = 0.0
    reference: Optional[PeriodicPotential] = None

    def shifted(self, c: float) -> "HillOperator":
        ref = self.reference.shifted(c) if self.reference is not None else None
        return replace(self, shift=self.shift + c, reference=ref)

    def V(self, x: float) -> float:
        return self.potential.eval(x) + self.shift

    def a(self, x: float) -> float:
        return 0.0 if self.drift is None else -2.0 * self.drift.eval(x)

    @property
    def grid_size(self) -> int:
        return self.potential.grid_size

    def trace_potential(self) -> Optional[PeriodicPotential]:
        """Smooth potential whose trace coefficients describe this operator."""
        if self.drift is None:
            return self.potential.shifted(self.shift)
        return self.reference

    def wavenumber_bound(self) -> float:
        """Bound on sqrt|V| + |q| used for step control."""
        vmax = float(np.max(np.abs(self.potential.samples() + self.shift)))
        qmax = 0.0 if self.drift is None else self.drift.max_abs()
        return float(np.sqrt(vmax) + qmax)

    def wronskian(self, x) -> np.ndarray:
        """theta phi' - theta' phi = exp(-2 int_0^x q)."""
        xa = np.asarray(x, dtype=float)
        if self.drift is None:
            return np.ones_like(xa)
        return np.exp(-2.0 * self.drift.primitive(xa))


def as_operator(p: Union[PeriodicPotential, HillOperator]) -> HillOperator:
    if isinstance(p, HillOperator):
        return p
    if isinstance(p, PeriodicPotential):
        return HillOperator(p)
    raise MonodromyError(f"expected PeriodicPotential or HillOperator, got {type(p).__name__}")


@dataclass(frozen=True, eq=False)
class MonodromySolution:
    """Fundamental system along x_grid at one momentum z."""
    z: complex
    x_grid: np.ndarray
    theta: np.ndarray
    theta_prime: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    delta: complex
    beta: complex
    delta_z: complex
    wronskian_expected: np.ndarray = field(repr=False, default=None)

    def wronskian(self) -> np.ndarray:
        return self.theta * self.phi_prime - self.theta_prime * self.phi

    def wronskian_defect(self) -> float:
        expected = 1.0 if self.wronskian_expected is None else self.wronskian_expected
        return float(np.max(np.abs(self.wronskian() - expected)))


@dataclass(frozen=True, eq=False)
class MonodromyBatch:
    """Period-end data for an array of momenta (or energies)."""
    z: np.ndarray
    energy: np.ndarray
    theta1: np.ndarray
    theta1_prime: np.ndarray
    phi1: np.ndarray
    phi1_prime: np.ndarray
    delta: np.ndarray
    delta_E: np.ndarray

    @property
    def delta_z(self) -> np.ndarray:
        return 2.0 * self.z * self.delta_E

    @property
    def beta(self) -> np.ndarray:
        return 0.5 * (self.phi1_prime - self.theta1)


def _integrate_chunk(op: HillOperator, energies: np.ndarray, x_eval: np.ndarray,
                     config: IntegratorConfig, kbound: float) -> np.ndarray:
    m = energies.size
    dtype = energies.dtype
    y0 = np.zeros((N_STATE, m), dtype=dtype)
    y0[0] = 1.0
    y0[3] = 1.0
    kmax = float(np.sqrt(np.max(np.abs(energies)))) + kbound
    max_step = config.phase_cap / max(kmax, 1.0)
    n_comp = N_STATE * m
    # solve_ivp measures error in RMS over all components
    rtol = max(config.rtol / np.sqrt(n_comp), config.min_rtol)
    atol = config.atol / np.sqrt(n_comp)

    def rhs(x, y):
        s = y.reshape(N_STATE, m)
        a = op.a(x)
        w = op.V(x) - energies
        out = np.empty_like(s)
        out[0] = s[1]
        out[1] = a * s[1] + w * s[0]
        out[2] = s[3]
        out[3] = a * s[3] + w * s[2]
        out[4] = s[5]
        out[5] = a * s[5] + w * s[4] - s[0]
        out[6] = s[7]
        out[7] = a * s[7] + w * s[6] - s[2]
        return out.ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), y0.ravel(), method=config.method, t_eval=x_eval,
                    rtol=rtol, atol=atol, max_step=max_step)
    if not sol.success:
        worst = energies[np.argmax(np.abs(energies))]
        logger.error(f"Integration failed near E={worst}: {sol.message} (nfev={sol.nfev})")
        raise IntegrationError(f"integration failed near E={worst}: {sol.message}",
                               z=np.sqrt(complex(worst)), nfev=sol.nfev)
    logger.debug(f"Integrated {m} energies up to |E|={np.max(np.abs(energies)):.3g} with nfev={sol.nfev}")
    return sol.y.reshape(N_STATE, m, x_eval.size)


def integrate_energies(p: Union[PeriodicPotential, HillOperator], energies,
                       x_eval=None, config: Optional[IntegratorConfig] = None) -> np.ndarray:
    """
    Integrate the fundamental system and its d/dE variation for many energies.

    Args:
        p: Potential or operator.
        energies: 1-D array of energies E (real or complex).
        x_eval: Stored x points (default [0, 1]).
        config: Integrator settings.

    Returns:
        Array of shape (8, len(energies), len(x_eval)).
    """
    op = as_operator(p)
    config = config or IntegratorConfig()
    E = np.atleast_1d(np.asarray(energies))
    if E.ndim != 1:
        raise MonodromyError("energies must be a 1-D array")
    if np.iscomplexobj(E) and np.any(E.imag != 0.0):
        E = E.astype(complex)
    else:
        E = np.real(E).astype(float)
    if not np.all(np.isfinite(E)):
        raise MonodromyError("energies must be finite")
    xs = np.array([0.0, 1.0]) if x_eval is None else np.asarray(x_eval, dtype=float)
    kbound = op.wavenumber_bound()
    out = np.empty((N_STATE, E.size, xs.size), dtype=E.dtype)
    order = np.argsort(np.abs(E), kind="stable")
    for start in range(0, E.size, config.chunk_size):
        idx = order[start:start + config.chunk_size]
        out[:, idx, :] = _integrate_chunk(op, E[idx], xs, config, kbound)
    return out


def _batch_from_states(z: np.ndarray, E: np.ndarray, states: np.ndarray) -> MonodromyBatch:
    end = states[:, :, -1]
    return MonodromyBatch(z=z, energy=E, theta1=end[0], theta1_prime=end[1],
                          phi1=end[2], phi1_prime=end[3],
                          delta=0.5 * (end[0] + end[3]), delta_E=0.5 * (end[4] + end[7]))


def integrate_batch(p: Union[PeriodicPotential, HillOperator], z,
                    config: Optional[IntegratorConfig] = None) -> MonodromyBatch:
    """Period-end data for an array of momenta; E = z^2 keeps Delta exactly even."""
    za = np.atleast_1d(np.asarray(z))
    if np.iscomplexobj(za) and np.any(za.imag != 0.0):
        za = za.astype(complex)
    else:
        za = np.real(za).astype(float)
    E = za * za
    states = integrate_energies(p, E, config=config)
    return _batch_from_states(za, E, states)


def energy_batch(p: Union[PeriodicPotential, HillOperator], energies,
                 config: Optional[IntegratorConfig] = None) -> MonodromyBatch:
    """Period-end data for an array of energies (momentum left as sqrt(E))."""
    E = np.atleast_1d(np.asarray(energies))
    states = integrate_energies(p, E, config=config)
    E = E.astype(states.dtype)
    return _batch_from_states(np.sqrt(E.astype(complex)), E, states)


def integrate(p: Union[PeriodicPotential, HillOperator], z: complex, n_store: int = 2,
              config: Optional[IntegratorConfig] = None) -> MonodromySolution:
    """
    Fundamental system of -y'' + p y = z^2 y on [0, 1] stored at n_store uniform points.

    Returns:
        MonodromySolution with Delta, beta and dDelta/dz.
    """
    if n_store < 2:
        raise MonodromyError(f"n_store must be at least 2, got {n_store}")
    op = as_operator(p)
    zc = complex(z)
    E = zc * zc if zc.imag != 0.0 else zc.real * zc.real
    xs = np.linspace(0.0, 1.0, n_store)
    states = integrate_energies(op, np.array([E]), x_eval=xs, config=config)[:, 0, :].astype(complex)
    delta = 0.5 * (states[0, -1] + states[3, -1])
    delta_E = 0.5 * (states[4, -1] + states[7, -1])
    return MonodromySolution(z=zc, x_grid=xs, theta=states[0], theta_prime=states[1],
                             phi=states[2], phi_prime=states[3], delta=complex(delta),
                             beta=complex(0.5 * (states[3, -1] - states[0, -1])),
                             delta_z=complex(2.0 * zc * delta_E),
                             wronskian_expected=op.wronskian(xs))


def lyapunov_on_energy(p: Union[PeriodicPotential, HillOperator], lam: float,
                       config: Optional[IntegratorConfig] = None) -> float:
    """Delta as a function of the (real) energy lambda."""
    if lam >= 0.0:
        return float(integrate(p, np.sqrt(lam), config=config).delta.real)
    return float(energy_batch(p, [lam], config=config).delta[0].real)
