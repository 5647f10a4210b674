#!/usr/bin/env python3
"""
diffalg.py

Exact differential-polynomial algebra over the jet variables u_j = p^(j).

Generates the kappa hierarchy, evaluates it on a potential and derives the
high-energy coefficients P_j, the model phase xi_m and the functions
rho, omega, tau, K_m built from them.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np
from loguru import logger

from potential import JetOrderError, PeriodicPotential

Monomial = Tuple[int, ...]
Number = Union[int, Fraction]


class DiffAlgError(Exception):
    """Base exception for differential-polynomial errors."""
    pass


class XiDomainError(DiffAlgError):
    """Raised when a high-energy model is evaluated at z = 0."""
    pass


def _trim(exps: Iterable[int]) -> Monomial:
    e = list(exps)
    while e and e[-1] == 0:
        e.pop()
    return tuple(e)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    size = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size))


def _mono_key(m: Monomial) -> Tuple[int, Tuple[int, ...]]:
    # graded lex: total degree first, then u_0 > u_1 > ... within a degree
    return sum(m), tuple(-e for e in m)


class DiffPolynomial:
    """
    Polynomial in u_0 = p, u_1 = p', ... with exact rational coefficients.

    Terms map trimmed exponent tuples to Fractions; zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] = None):
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            c = Fraction(coeff)
            if c != 0:
                key = _trim(mono)
                clean[key] = clean.get(key, Fraction(0)) + c
                if clean[key] == 0:
                    del clean[key]
        self.terms = clean

    @classmethod
    def jet(cls, j: int) -> "DiffPolynomial":
        """The variable u_j."""
        return cls({(0,) * j + (1,): 1})

    @classmethod
    def constant(cls, c: Number) -> "DiffPolynomial":
        return cls({(): c})

    # ---- Ring operations ----
    def __add__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return DiffPolynomial(out)

    def __neg__(self) -> "DiffPolynomial":
        return DiffPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        return self + (-other)

    def __mul__(self, other: Union["DiffPolynomial", Number]) -> "DiffPolynomial":
        if isinstance(other, (int, Fraction)):
            return DiffPolynomial({m: c * other for m, c in self.terms.items()})
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                key = _mono_mul(ma, mb)
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return DiffPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"DiffPolynomial({self.serialize()})"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def order(self) -> int:
        """Highest jet index present (-1 for constants)."""
        return max((len(m) - 1 for m in self.terms), default=-1)

    def total_derivative(self, max_jet: int = 8) -> "DiffPolynomial":
        """
        d/dx acting through the chain rule u_j -> u_{j+1}.

        Raises:
            JetOrderError: if the result would involve u_{max_jet + 1}.
        """
        if self.order + 1 > max_jet:
            raise JetOrderError(f"derivative needs jet order {self.order + 1} > budget {max_jet}")
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            for j, e in enumerate(mono):
                if e == 0:
                    continue
                new = list(mono) + [0]
                new[j] -= 1
                new[j + 1] += 1
                key = _trim(new)
                out[key] = out.get(key, Fraction(0)) + c * e
        return DiffPolynomial(out)

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: _mono_key(item[0]))

    def leading_term(self) -> Tuple[Monomial, Fraction]:
        """Lowest-degree term in graded order (the linear part for the kappa hierarchy)."""
        if self.is_zero:
            raise DiffAlgError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def serialize(self) -> str:
        """Canonical text form, e.g. '+1*u2 -1*u0^2'."""
        if self.is_zero:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            sign = "+" if c > 0 else "-"
            mag = abs(c)
            factors = [f"u{j}" if e == 1 else f"u{j}^{e}" for j, e in enumerate(mono) if e]
            parts.append(f"{sign}{mag}" + ("*" + "*".join(factors) if factors else ""))
        return " ".join(parts)

    def evaluate(self, jets: List[np.ndarray]) -> np.ndarray:
        """Evaluate with u_j replaced by jets[j] (arrays of equal shape)."""
        if self.order >= len(jets):
            raise DiffAlgError(f"need {self.order + 1} jet arrays, got {len(jets)}")
        shape = np.shape(jets[0]) if jets else ()
        total = np.zeros(shape)
        for mono, c in self.terms.items():
            term = np.full(shape, float(c))
            for j, e in enumerate(mono):
                if e:
                    term = term * jets[j] ** e
            total = total + term
        return total


def kappa_sequence(m: int, max_jet: int = 8) -> List[DiffPolynomial]:
    """
    kappa_1 = u0, kappa_{j+1} = -D kappa_j - sum_{s=1}^{j-1} kappa_{j-s} kappa_s.

    Args:
        m: Number of terms, m >= 1.
        max_jet: Jet budget; kappa_m involves u_{m-1}.

    Returns:
        [kappa_1, ..., kappa_m]
    """
    if m < 1:
        raise DiffAlgError(f"kappa_sequence needs m >= 1, got {m}")
    if m - 1 > max_jet:
        raise JetOrderError(f"kappa_{m} needs jet order {m - 1} > budget {max_jet}")
    return list(_kappa_cached(m, max_jet))


@lru_cache(maxsize=16)
def _kappa_cached(m: int, max_jet: int) -> Tuple[DiffPolynomial, ...]:
    seq = [DiffPolynomial.jet(0)]
    for j in range(1, m):
        nxt = -seq[j - 1].total_derivative(max_jet)
        for s in range(1, j):
            nxt = nxt - seq[j - s - 1] * seq[s - 1]
        seq.append(nxt)
    logger.debug(f"Generated kappa_1..kappa_{m}; kappa_{m} has {len(seq[-1].terms)} terms")
    return tuple(seq)


def dump_kappa(m: int, max_jet: int = 8) -> str:
    return "\n".join(f"k{j} = {k.serialize()}" for j, k in enumerate(kappa_sequence(m, max_jet), start=1))


def jets_on_grid(p: PeriodicPotential, order: int) -> List[np.ndarray]:
    """[p, p', ..., p^(order)] sampled on p's grid."""
    return [p.derivative(j).samples() for j in range(order + 1)]


def eval_diffpoly(q: DiffPolynomial, p: PeriodicPotential) -> np.ndarray:
    """Substitute p^(j) for u_j and sample on the uniform grid."""
    if q.order > p.max_jet:
        raise JetOrderError(f"polynomial needs jet order {q.order} > potential budget {p.max_jet}")
    return q.evaluate(jets_on_grid(p, max(q.order, 0)))


def coefficients_P(p: PeriodicPotential, m: int) -> List[float]:
    """
    P_{j-1} = (-1)^j 2^{-(2j+1)} * integral of kappa_{2j+1}, j = 0..m.

    Returns:
        [P_{-1}, P_0, ..., P_{m-1}]
    """
    if m < 0:
        raise DiffAlgError(f"coefficients_P needs m >= 0, got {m}")
    kappas = kappa_sequence(2 * m + 1, p.max_jet)
    jets = jets_on_grid(p, 2 * m)
    out = []
    for j in range(m + 1):
        integral = float(np.mean(kappas[2 * j].evaluate(jets)))
        out.append((-1) ** j * integral / 2 ** (2 * j + 1))
    return out


def max_available_P(p: PeriodicPotential) -> int:
    """Largest m such that coefficients_P(p, m) fits the jet budget."""
    return p.max_jet // 2


# F_j densities of the closed trace formulas, in jet variables
F_POLYNOMIALS: Dict[int, DiffPolynomial] = {
    1: DiffPolynomial({(3,): 2}),
    2: DiffPolynomial({(1, 2): 10, (4,): 5}),
    3: DiffPolynomial({(1, 0, 2): 14, (2, 2): 70, (5,): 14}),
}


def check_F_formulas(p: PeriodicPotential) -> Dict[str, object]:
    """
    Compare P_j = (||p^(j)||^2 + int F_j) / 2^{3+2j} against the kappa route for j = 1, 2, 3.

    Returns:
        Report with both values and the relative discrepancy per j.
    """
    if max_available_P(p) < 2:
        raise JetOrderError(f"check_F_formulas needs jet budget >= 4, got {p.max_jet}")
    m = min(4, max_available_P(p))
    via_kappa = coefficients_P(p, m)
    jets = jets_on_grid(p, 2)
    rows = []
    worst = 0.0
    for j in (1, 2, 3):
        if j + 1 >= len(via_kappa):
            logger.warning(f"P_{j} not available within jet budget {p.max_jet}; skipped")
            continue
        norm = p.derivative(j).l2_norm_sq()
        f_int = float(np.mean(F_POLYNOMIALS[j].evaluate(jets)))
        via_f = (norm + f_int) / 2 ** (3 + 2 * j)
        ref = via_kappa[j + 1]
        scale = max(abs(ref), abs(via_f))
        rel = 0.0 if scale == 0.0 else abs(via_f - ref) / scale
        worst = max(worst, rel)
        rows.append({"j": j, "P_via_F": via_f, "P_via_kappa": ref, "rel_discrepancy": rel})
    return {"rows": rows, "max_rel_discrepancy": worst}


@dataclass(frozen=True, eq=False)
class AsymptoticModel:
    """
    High-energy model of order m for a fixed potential.

    P holds P_{-1}..P_{m-1}; kappa_int the period integrals of kappa_1..kappa_m;
    kappa_at_zero the values kappa_j(0); xi_tables the periodic primitives of
    kappa_j - mean, so that C_j(x) = kappa_int[j] * x + xi_tables[j](x).
    """
    m: int
    P: Tuple[float, ...]
    kappa_int: Tuple[float, ...]
    kappa_at_zero: Tuple[float, ...]
    xi_tables: Tuple[PeriodicPotential, ...]
    kappa_funcs: Tuple[PeriodicPotential, ...]

    @staticmethod
    def _check_z(z) -> np.ndarray:
        za = np.asarray(z, dtype=complex)
        if np.any(za == 0):
            raise XiDomainError("high-energy model evaluated at z = 0")
        return za

    def K(self, z):
        """K_m(z) = sum_{j=-1}^{m-1} P_j / z^{2j+3}."""
        za = self._check_z(z)
        total = np.zeros_like(za)
        for idx, pj in enumerate(self.P):
            total = total + pj / za ** (2 * idx + 1)
        return total

    def xi(self, x, z):
        """xi_m(x, z) = z x - i sum_j C_j(x) / (2iz)^j with C_j the primitive of kappa_j."""
        za = self._check_z(z)
        xa = np.asarray(x, dtype=float)
        total = np.multiply.outer(xa, za) if za.ndim else xa * za
        for j, table in enumerate(self.xi_tables, start=1):
            cj = self.kappa_int[j - 1] * xa + table.eval(xa)
            total = total - 1j * (np.multiply.outer(cj, 1.0 / (2j * za) ** j) if za.ndim else cj / (2j * za) ** j)
        return total

    def xi_prime(self, x, z):
        """d/dx xi_m(x, z) = z - i sum_j kappa_j(x) / (2iz)^j."""
        za = self._check_z(z)
        xa = np.asarray(x, dtype=float)
        total = np.zeros(np.shape(xa) + np.shape(za), dtype=complex) + za
        for j, func in enumerate(self.kappa_funcs, start=1):
            kj = func.eval(xa)
            total = total - 1j * (np.multiply.outer(kj, 1.0 / (2j * za) ** j) if za.ndim else kj / (2j * za) ** j)
        return total

    def rho(self, z):
        za = self._check_z(z)
        total = 1j * za
        for j, k0 in enumerate(self.kappa_at_zero, start=1):
            total = total + k0 / (2j * za) ** j
        return total

    def omega(self, z):
        return (self.rho(z) - self.rho(-np.asarray(z, dtype=complex))) / 2j

    def tau(self, z):
        return (self.rho(z) + self.rho(-np.asarray(z, dtype=complex))) / 2


@lru_cache(maxsize=32)
def build_model(p: PeriodicPotential, m: int) -> AsymptoticModel:
    """Precompute the tables of the order-m model for p (cached per potential object)."""
    if m < 0:
        raise DiffAlgError(f"model order must be non-negative, got {m}")
    n_kappa = max(m, 1)
    kappas = kappa_sequence(n_kappa, p.max_jet)[:m]
    n_p = min(m, max_available_P(p))
    if n_p < m:
        logger.warning(f"K_{m} truncated to P_{{{n_p - 1}}}: jet budget {p.max_jet}")
    P = tuple(coefficients_P(p, n_p))
    jets = jets_on_grid(p, max(m - 1, 0))
    funcs = []
    tables = []
    ints = []
    at_zero = []
    for kappa in kappas:
        vals = kappa.evaluate(jets)
        func = PeriodicPotential.from_samples(vals, max_harmonic=p.grid_size // 2 - 1, max_jet=0)
        funcs.append(func)
        tables.append(func.periodic_primitive())
        ints.append(func.mean)
        at_zero.append(float(vals[0]))
    return AsymptoticModel(m, P, tuple(ints), tuple(at_zero), tuple(tables), tuple(funcs))


def xi_model(p: PeriodicPotential, m: int, x, z):
    """xi_m(x, z) evaluated through spectral primitives of kappa_j."""
    return build_model(p, m).xi(x, z)


def rho_omega_tau(p: PeriodicPotential, m: int, z):
    """(rho(z), omega(z), tau(z)) of the order-m model."""
    model = build_model(p, m)
    return model.rho(z), model.omega(z), model.tau(z)


def K_m(p: PeriodicPotential, m: int, z):
    return build_model(p, m).K(z)
