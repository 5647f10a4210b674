#!/usr/bin/env python3
"""
potential.py

1-periodic real potentials held as finite Fourier series.

- Spectral evaluation, termwise derivatives and primitives.
- Period integrals on the uniform grid (trapezoidal rule).
- JSON descriptors ("fourier" and "samples") and sample-to-coefficient conversion.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np
from loguru import logger

TWO_PI = 2.0 * np.pi

ArrayLike = Union[float, np.ndarray]


class PotentialError(Exception):
    """Base exception for periodic potential errors."""
    pass


class JetOrderError(PotentialError):
    """Raised when a derivative beyond the configured jet order is requested."""
    pass


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class PeriodicPotential:
    """
    p(x) = c_0 + sum_n c_n cos(2 pi n x) + sum_n s_n sin(2 pi n x).

    cos_coeffs[n] multiplies cos(2 pi n x) for n >= 0, sin_coeffs[n - 1]
    multiplies sin(2 pi n x) for n >= 1. Instances are immutable.
    """
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    grid_size: int = 1024
    max_jet: int = 8

    def __post_init__(self):
        if np.iscomplexobj(self.cos_coeffs) or np.iscomplexobj(self.sin_coeffs):
            raise PotentialError("Fourier coefficients must be real")
        cos = np.atleast_1d(np.asarray(self.cos_coeffs, dtype=float)).copy()
        sin = np.atleast_1d(np.asarray(self.sin_coeffs, dtype=float)).copy()
        if cos.size == 0:
            cos = np.zeros(1)
        if not (np.all(np.isfinite(cos)) and np.all(np.isfinite(sin))):
            raise PotentialError("Fourier coefficients must be finite")
        if not _is_power_of_two(int(self.grid_size)):
            raise PotentialError(f"grid_size must be a power of two, got {self.grid_size}")
        if self.max_jet < 0:
            raise PotentialError(f"max_jet must be non-negative, got {self.max_jet}")
        cos.setflags(write=False)
        sin.setflags(write=False)
        object.__setattr__(self, "cos_coeffs", cos)
        object.__setattr__(self, "sin_coeffs", sin)
        object.__setattr__(self, "grid_size", int(self.grid_size))
        if 8 * self.max_harmonic >= self.grid_size:
            logger.debug(f"Harmonic {self.max_harmonic} is above grid_size/8 = {self.grid_size // 8}")

    # ---- Construction helpers ----
    @classmethod
    def zero(cls, grid_size: int = 1024, max_jet: int = 8) -> "PeriodicPotential":
        return cls(np.zeros(1), np.zeros(0), grid_size, max_jet)

    @classmethod
    def constant(cls, c: float, grid_size: int = 1024, max_jet: int = 8) -> "PeriodicPotential":
        return cls(np.array([float(c)]), np.zeros(0), grid_size, max_jet)

    @classmethod
    def from_samples(cls, values, max_harmonic: Optional[int] = None,
                     max_jet: int = 8) -> "PeriodicPotential":
        """
        Convert uniform samples at x = j/N to Fourier coefficients with a real FFT.

        Args:
            values: Samples of one period, N a power of two.
            max_harmonic: Highest harmonic kept (default N/8).
            max_jet: Jet order budget of the result.

        Returns:
            PeriodicPotential on a grid of N points.
        """
        vals = np.asarray(values, dtype=float)
        n = vals.size
        if vals.ndim != 1 or not _is_power_of_two(n):
            raise PotentialError(f"samples must be a 1-D array of power-of-two length, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise PotentialError("samples must be finite")
        h = n // 8 if max_harmonic is None else int(max_harmonic)
        h = max(0, min(h, n // 2 - 1))
        spec = np.fft.rfft(vals) / n
        dropped = float(np.sum(np.abs(spec[h + 1:]) ** 2))
        if dropped > 1e-24:
            logger.debug(f"from_samples dropped harmonics above {h} carrying energy {dropped:.3e}")
        cos = np.empty(h + 1)
        cos[0] = spec[0].real
        cos[1:] = 2.0 * spec[1:h + 1].real
        sin = -2.0 * spec[1:h + 1].imag
        return cls(cos, sin, n, max_jet)

    @classmethod
    def from_descriptor(cls, descriptor: Dict[str, Any], grid_size: int = 1024,
                        max_jet: int = 8) -> "PeriodicPotential":
        """Build a potential from a {"type": "fourier"|"samples", ...} descriptor."""
        if not isinstance(descriptor, dict):
            raise PotentialError("potential descriptor must be a JSON object")
        kind = descriptor.get("type")
        try:
            if kind == "fourier":
                return cls(np.asarray(descriptor.get("cos", [0.0]), dtype=float),
                           np.asarray(descriptor.get("sin", []), dtype=float),
                           grid_size, max_jet)
            if kind == "samples":
                values = np.asarray(descriptor["values"], dtype=float)
                if values.size != grid_size:
                    logger.warning(f"samples length {values.size} differs from grid_size {grid_size}; using {values.size}")
                return cls.from_samples(values, max_jet=max_jet)
        except PotentialError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            logger.error(f"Malformed potential descriptor: {e}")
            raise PotentialError(f"Malformed potential descriptor: {e}") from e
        raise PotentialError(f"Unknown potential descriptor type: {kind!r}")

    def to_descriptor(self) -> Dict[str, Any]:
        return {"type": "fourier",
                "cos": [float(c) for c in self.cos_coeffs],
                "sin": [float(s) for s in self.sin_coeffs]}

    # ---- Basic properties ----
    @property
    def mean(self) -> float:
        return float(self.cos_coeffs[0])

    @property
    def max_harmonic(self) -> int:
        nz_cos = np.nonzero(self.cos_coeffs[1:])[0]
        nz_sin = np.nonzero(self.sin_coeffs)[0]
        top = 0
        if nz_cos.size:
            top = max(top, int(nz_cos[-1]) + 1)
        if nz_sin.size:
            top = max(top, int(nz_sin[-1]) + 1)
        return top

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.cos_coeffs) or np.any(self.sin_coeffs))

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    def _with(self, cos, sin) -> "PeriodicPotential":
        return PeriodicPotential(cos, sin, self.grid_size, self.max_jet)

    # ---- Evaluation ----
    def eval(self, x: ArrayLike) -> ArrayLike:
        """Value of the trigonometric series at x (scalar or array)."""
        xa = np.asarray(x, dtype=float)
        n_cos = np.arange(self.cos_coeffs.size)
        val = np.cos(TWO_PI * np.multiply.outer(xa, n_cos)) @ self.cos_coeffs
        if self.sin_coeffs.size:
            n_sin = np.arange(1, self.sin_coeffs.size + 1)
            val = val + np.sin(TWO_PI * np.multiply.outer(xa, n_sin)) @ self.sin_coeffs
        return float(val) if xa.ndim == 0 else val

    __call__ = eval

    def samples(self) -> np.ndarray:
        """Values on the uniform grid x_j = j/grid_size."""
        return self.eval(self.grid)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples())))

    def period_integral(self) -> float:
        return self.mean

    def l2_norm_sq(self) -> float:
        """Integral of p^2 over one period (Parseval)."""
        c = self.cos_coeffs
        return float(c[0] ** 2 + 0.5 * (np.sum(c[1:] ** 2) + np.sum(self.sin_coeffs ** 2)))

    def _harmonic_power(self) -> np.ndarray:
        """a_n^2 + b_n^2 for n = 1..H."""
        h = max(self.cos_coeffs.size - 1, self.sin_coeffs.size)
        power = np.zeros(h)
        power[:self.cos_coeffs.size - 1] += self.cos_coeffs[1:] ** 2
        power[:self.sin_coeffs.size] += self.sin_coeffs ** 2
        return power

    def sobolev_norm_sq(self, order: int) -> float:
        """||p^(order)||^2 from the coefficients, without building the derivative."""
        if order < 0:
            raise PotentialError(f"Sobolev order must be non-negative, got {order}")
        power = self._harmonic_power()
        n = np.arange(1, power.size + 1)
        mean_part = self.mean ** 2 if order == 0 else 0.0
        return float(mean_part + 0.5 * np.sum((2 * np.pi * n) ** (2 * order) * power))

    def in_sobolev(self, order: int, tail_fraction: float = 1e-2) -> bool:
        """
        Whether p is resolved as an element of H_order on this grid.

        The top quarter of the harmonics must carry at most tail_fraction of
        ||p^(order)||^2; sampled inputs of low regularity fail this.
        """
        total = self.sobolev_norm_sq(order)
        power = self._harmonic_power()
        if total == 0.0 or power.size == 0:
            return True
        cut = power.size - power.size // 4
        n = np.arange(cut + 1, power.size + 1)
        tail = 0.5 * np.sum((2 * np.pi * n) ** (2 * order) * power[cut:])
        return bool(tail <= tail_fraction * total)

    # ---- Calculus ----
    def derivative(self, order: int = 1) -> "PeriodicPotential":
        """
        Exact termwise derivative of the series.

        Args:
            order: Derivative order, 0 <= order <= max_jet.

        Returns:
            The derivative as a new PeriodicPotential.
        """
        if order < 0:
            raise PotentialError(f"derivative order must be non-negative, got {order}")
        if order > self.max_jet:
            raise JetOrderError(f"derivative of order {order} exceeds jet budget {self.max_jet}")
        cos = np.array(self.cos_coeffs)
        size = max(cos.size, self.sin_coeffs.size + 1)
        a = np.zeros(size)
        b = np.zeros(size)
        a[:cos.size] = cos
        b[1:self.sin_coeffs.size + 1] = self.sin_coeffs
        omega = TWO_PI * np.arange(size)
        for _ in range(order):
            a, b = b * omega, -a * omega
        return self._with(a, b[1:])

    def periodic_primitive(self) -> "PeriodicPotential":
        """Primitive of p - mean(p) that vanishes at x = 0."""
        a = self.cos_coeffs
        b = self.sin_coeffs
        size = max(a.size, b.size + 1)
        omega = TWO_PI * np.arange(1, size)
        aa = np.zeros(size - 1)
        bb = np.zeros(size - 1)
        aa[:a.size - 1] = a[1:]
        bb[:b.size] = b
        cos = np.zeros(size)
        cos[1:] = -bb / omega
        cos[0] = float(np.sum(bb / omega))
        sin = aa / omega
        return self._with(cos, sin)

    def primitive(self, x: ArrayLike) -> ArrayLike:
        """Integral of p from 0 to x."""
        xa = np.asarray(x, dtype=float)
        val = self.mean * xa + self.periodic_primitive().eval(xa)
        return float(val) if xa.ndim == 0 else val

    # ---- Algebra ----
    def shifted(self, c: float) -> "PeriodicPotential":
        cos = np.array(self.cos_coeffs)
        cos[0] += c
        return self._with(cos, self.sin_coeffs)

    def scaled(self, factor: float) -> "PeriodicPotential":
        return self._with(self.cos_coeffs * factor, self.sin_coeffs * factor)

    def translated(self, shift: float) -> "PeriodicPotential":
        """The potential x -> p(x + shift)."""
        size = max(self.cos_coeffs.size, self.sin_coeffs.size + 1)
        a = np.zeros(size)
        b = np.zeros(size)
        a[:self.cos_coeffs.size] = self.cos_coeffs
        b[1:self.sin_coeffs.size + 1] = self.sin_coeffs
        phase = TWO_PI * np.arange(size) * shift
        ca, sa = np.cos(phase), np.sin(phase)
        return self._with(a * ca + b * sa, (b * ca - a * sa)[1:])

    def __add__(self, other: "PeriodicPotential") -> "PeriodicPotential":
        if not isinstance(other, PeriodicPotential):
            return NotImplemented
        nc = max(self.cos_coeffs.size, other.cos_coeffs.size)
        ns = max(self.sin_coeffs.size, other.sin_coeffs.size)
        cos = np.zeros(nc)
        sin = np.zeros(ns)
        cos[:self.cos_coeffs.size] += self.cos_coeffs
        cos[:other.cos_coeffs.size] += other.cos_coeffs
        sin[:self.sin_coeffs.size] += self.sin_coeffs
        sin[:other.sin_coeffs.size] += other.sin_coeffs
        return self._with(cos, sin)

    def __sub__(self, other: "PeriodicPotential") -> "PeriodicPotential":
        if not isinstance(other, PeriodicPotential):
            return NotImplemented
        return self + other.scaled(-1.0)

    def multiply(self, other: "PeriodicPotential") -> "PeriodicPotential":
        """Pointwise product, exact while the summed harmonics stay below grid_size/2."""
        if self.max_harmonic + other.max_harmonic >= self.grid_size // 2:
            raise PotentialError("product harmonics exceed the grid Nyquist limit")
        return PeriodicPotential.from_samples(self.samples() * other.samples(),
                                              max_harmonic=self.grid_size // 2 - 1,
                                              max_jet=self.max_jet)


def derivative(p: PeriodicPotential, order: int) -> PeriodicPotential:
    return p.derivative(order)


def period_integral(values) -> float:
    """Trapezoidal rule on the periodic uniform grid (the sample mean)."""
    vals = np.asarray(values)
    if vals.size == 0:
        raise PotentialError("period_integral needs at least one sample")
    return float(np.mean(vals))
