#!/usr/bin/env python3
"""
spectrum.py

Band edges, momentum gaps and comb data from the Lyapunov function.

- Ground edge E_0^+ (smallest root of Delta = 1) and optional normalization.
- Periodic/antiperiodic edges e_n^+- bracketed on a momentum grid and refined
  by a vectorised safeguarded Newton iteration using dDelta/dz.
- Comb heights h_n, gap quadrature tables for v(t + i0), gap masses M_n,
  moments Q_m with tail bounds, the Y_n functions and the S_n sums.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from diffalg import coefficients_P, max_available_P
from monodromy import (HillOperator, IntegratorConfig, as_operator, energy_batch,
                       integrate_batch)
from potential import PeriodicPotential


class SpectrumError(Exception):
    """Base exception for band-structure errors."""
    pass


class BracketError(SpectrumError):
    """Raised when the momentum scan finds fewer gaps than requested."""

    def __init__(self, message: str, found: int):
        super().__init__(message)
        self.found = found


class InterlacingError(SpectrumError):
    """Raised when refined edges violate E_0 < E_1^- <= E_1^+ < E_2^- <= ..."""
    pass


class GapDomainError(SpectrumError):
    """Raised when a point outside the closed gap is passed to a gap function."""
    pass


@dataclass
class SpectrumConfig:
    """Configuration for band-edge search and gap quadrature."""
    scan_step: float = 0.1
    degenerate_tol: float = 1e-8     # (-1)^n Delta(e_n) - 1 below this: degenerate
    collapse_width: float = 1e-9
    nodes_per_gap: int = 64
    edge_ftol: float = 1e-13
    edge_xtol: float = 1e-13
    max_edge_iter: int = 60
    extremum_xtol: float = 1e-11
    ground_scan_points: int = 65
    ground_xtol: float = 1e-14       # |E0| below this is reported as exactly 0
    max_scan_extensions: int = 3


@dataclass(frozen=True, eq=False)
class GapTable:
    """Quadrature of v(t + i0) on one gap: integral of v*f over g_n ~ sum(weights * f(nodes))."""
    n: int
    e_minus: float
    e_plus: float
    nodes: np.ndarray
    weights: np.ndarray
    v: np.ndarray

    @property
    def center(self) -> float:
        return 0.5 * (self.e_minus + self.e_plus)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.e_plus - self.e_minus)

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights) / np.pi)


@dataclass(frozen=True, eq=False)
class BandStructure:
    """Edges and comb data of the first n_gaps gaps."""
    operator: HillOperator
    normalized: bool
    E0: float
    n_gaps: int
    E_minus: np.ndarray
    E_plus: np.ndarray
    e_minus: np.ndarray
    e_plus: np.ndarray
    e_max: np.ndarray
    h: np.ndarray
    M: np.ndarray
    degenerate: np.ndarray
    s_min: float
    tables: Tuple[Optional[GapTable], ...]
    P: Tuple[float, ...]
    z_limit: float
    integrator: IntegratorConfig
    config: SpectrumConfig

    @property
    def e0(self) -> float:
        """Lowest momentum edge: 0 when normalized, sqrt(E0) if E0 > 0."""
        if self.normalized:
            return 0.0
        return float(np.sqrt(max(self.E0, 0.0)))

    @property
    def gap_lengths(self) -> np.ndarray:
        return self.e_plus - self.e_minus

    @property
    def gamma_lengths(self) -> np.ndarray:
        return self.E_plus - self.E_minus

    @property
    def resolved(self) -> np.ndarray:
        """1-based indices of non-degenerate gaps."""
        return np.nonzero(~self.degenerate)[0] + 1

    def live_tables(self) -> List[GapTable]:
        return [t for t in self.tables if t is not None]

    def trace_coefficient(self, j: int) -> Optional[float]:
        """P_j if available (j >= -1)."""
        idx = j + 1
        return self.P[idx] if 0 <= idx < len(self.P) else None


def _lyapunov(op: HillOperator, z, integrator: IntegratorConfig):
    batch = integrate_batch(op, np.asarray(z, dtype=float), integrator)
    return batch.delta.real, batch.delta_z.real


def ground_edge(p: Union[PeriodicPotential, HillOperator], integrator: Optional[IntegratorConfig] = None,
                config: Optional[SpectrumConfig] = None) -> float:
    """
    Smallest real lambda with Delta(lambda) = 1.

    Delta - 1 is positive below E_0^+; the energy axis is sampled upward from
    min(V) - 1 and the first sign change is refined with Brent's method.
    """
    op = as_operator(p)
    integrator = integrator or IntegratorConfig()
    config = config or SpectrumConfig()
    values = op.potential.samples() + op.shift
    lo, hi = float(np.min(values)) - 1.0, float(np.mean(values)) + 0.5
    lams = np.linspace(lo, hi, config.ground_scan_points)
    f = energy_batch(op, lams, integrator).delta.real - 1.0
    below = np.nonzero(f <= 0.0)[0]
    if below.size == 0 or below[0] == 0:
        raise SpectrumError(f"no ground-edge sign change of Delta - 1 on [{lo:.6g}, {hi:.6g}]")
    k = int(below[0])
    if f[k] == 0.0:
        return _snap_ground(float(lams[k]), config)

    def func(lam: float) -> float:
        return float(energy_batch(op, [lam], integrator).delta[0].real) - 1.0

    try:
        root = brentq(func, lams[k - 1], lams[k], xtol=config.ground_xtol, rtol=4 * np.finfo(float).eps)
    except ValueError as e:
        logger.error(f"Ground edge refinement failed: {e}")
        raise SpectrumError(f"ground edge refinement failed: {e}") from e
    logger.debug(f"Ground edge E0 = {root:.15g}")
    return _snap_ground(float(root), config)


def _snap_ground(E0: float, config: SpectrumConfig) -> float:
    """E0 within the Brent tolerance of 0 is 0; otherwise round-off leaks into P_{-1}."""
    return 0.0 if abs(E0) <= config.ground_xtol else E0


def _scan(op: HillOperator, n_gaps: int, integrator: IntegratorConfig, config: SpectrumConfig):
    step = min(config.scan_step, np.pi / 8)
    z_max = (n_gaps + 1.5) * np.pi + 1.0
    zs = np.arange(0.0, z_max + step, step)
    delta, dz = _lyapunov(op, zs, integrator)
    if delta[0] <= 0.0:
        raise SpectrumError("Delta(0) <= 0: the first band starts below zero energy; normalize the potential")
    for extension in range(config.max_scan_extensions + 1):
        positive = delta > 0.0
        crossings = np.nonzero(positive[:-1] != positive[1:])[0]
        if crossings.size >= n_gaps + 1:
            return zs, delta, dz, crossings
        if extension == config.max_scan_extensions:
            break
        extra = np.arange(zs[-1] + step, zs[-1] * 1.5, step)
        d_extra, dz_extra = _lyapunov(op, extra, integrator)
        zs = np.concatenate([zs, extra])
        delta = np.concatenate([delta, d_extra])
        dz = np.concatenate([dz, dz_extra])
        logger.debug(f"Extended momentum scan to {zs[-1]:.3f}")
    found = max(int(crossings.size) - 1, 0)
    logger.error(f"Bracket exhaustion: {found} of {n_gaps} gaps found up to z = {zs[-1]:.3f}")
    raise BracketError(f"only {found} of {n_gaps} gaps bracketed up to z = {zs[-1]:.3f}", found)


def _bisect_extremum(op, lo, hi, signs, integrator, config) -> np.ndarray:
    """Vectorised bisection for the sign change of signs * dDelta/dz."""
    lo = lo.copy()
    hi = hi.copy()
    while np.max(hi - lo) > config.extremum_xtol:
        mid = 0.5 * (lo + hi)
        _, dz = _lyapunov(op, mid, integrator)
        up = signs * dz > 0.0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return 0.5 * (lo + hi)


def _newton_edges(op, a, b, x_sign, a_negative, integrator, config) -> np.ndarray:
    """
    Safeguarded Newton for F = x_sign * Delta - 1 on brackets [a, b] where F changes sign.

    a_negative marks brackets with F(a) < 0. All brackets are iterated at once;
    steps leaving the bracket fall back to bisection.
    """
    a = a.copy()
    b = b.copy()
    x = 0.5 * (a + b)
    active = np.ones(a.size, dtype=bool)
    for _ in range(config.max_edge_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        delta, dz = _lyapunov(op, x[idx], integrator)
        F = x_sign[idx] * delta - 1.0
        dF = x_sign[idx] * dz
        same_as_a = (F < 0.0) == a_negative[idx]
        a[idx] = np.where(same_as_a, x[idx], a[idx])
        b[idx] = np.where(same_as_a, b[idx], x[idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x[idx] - F / dF
        lo = np.minimum(a[idx], b[idx])
        hi = np.maximum(a[idx], b[idx])
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        x_new = np.where(inside, newton, 0.5 * (a[idx] + b[idx]))
        scale = np.maximum(1.0, np.abs(x[idx]))
        converged = np.abs(F) <= config.edge_ftol
        done = converged | (np.abs(x_new - x[idx]) <= config.edge_xtol * scale)
        x[idx] = np.where(converged, x[idx], x_new)
        active[idx[done]] = False
    if np.any(active):
        logger.debug(f"{int(np.sum(active))} edges stopped at the iteration cap")
    return x


def find_band_edges(p: Union[PeriodicPotential, HillOperator], n_gaps: int, normalize: bool = True,
                    integrator: Optional[IntegratorConfig] = None,
                    config: Optional[SpectrumConfig] = None) -> BandStructure:
    """
    Locate the first n_gaps gaps of the operator.

    Args:
        p: Potential or operator.
        n_gaps: Number of gaps N >= 1.
        normalize: Shift the operator so that E_0^+ = 0.
        integrator: Integrator settings.
        config: Search and quadrature settings.

    Returns:
        BandStructure with edges, heights, masses and quadrature tables.
    """
    if n_gaps < 1:
        raise SpectrumError(f"n_gaps must be at least 1, got {n_gaps}")
    integrator = integrator or IntegratorConfig()
    config = config or SpectrumConfig()
    op = as_operator(p)
    E0 = ground_edge(op, integrator, config)
    if normalize:
        op = op.shifted(-E0)
    logger.info(f"Ground edge E0 = {E0:.12g}; searching {n_gaps} gaps (normalize={normalize})")

    zs, delta, dz, crossings = _scan(op, n_gaps, integrator, config)
    ns = np.arange(1, n_gaps + 1)
    signs = np.where(ns % 2 == 0, 1.0, -1.0)

    lo = np.empty(n_gaps)
    hi = np.empty(n_gaps)
    left = zs[crossings[:n_gaps]]
    right = zs[crossings[1:n_gaps + 1] + 1]
    for i, n in enumerate(ns):
        start, stop = crossings[i] + 1, crossings[i + 1]
        g = signs[i] * dz[start:stop + 1]
        nonpos = np.nonzero(g <= 0.0)[0]
        k = start + int(nonpos[0]) if nonpos.size else stop + 1
        lo[i], hi[i] = zs[k - 1], zs[k]
    e_ext = _bisect_extremum(op, lo, hi, signs, integrator, config)
    d_ext, _ = _lyapunov(op, e_ext, integrator)
    excess = signs * d_ext - 1.0
    degenerate = excess <= config.degenerate_tol

    e_minus = e_ext.copy()
    e_plus = e_ext.copy()
    live = np.nonzero(~degenerate)[0]
    if live.size:
        a = np.concatenate([left[live], e_ext[live]])
        b = np.concatenate([e_ext[live], right[live]])
        s2 = np.concatenate([signs[live], signs[live]])
        a_negative = np.concatenate([np.ones(live.size, dtype=bool), np.zeros(live.size, dtype=bool)])
        edges = _newton_edges(op, a, b, s2, a_negative, integrator, config)
        e_minus[live] = edges[:live.size]
        e_plus[live] = edges[live.size:]
    collapsed = (~degenerate) & (e_plus - e_minus < config.collapse_width)
    if np.any(collapsed):
        logger.debug(f"Collapsed {int(np.sum(collapsed))} gaps narrower than {config.collapse_width}")
        degenerate = degenerate | collapsed
        e_minus[collapsed] = e_plus[collapsed] = e_ext[collapsed]
    h = np.where(degenerate, 0.0, np.arccosh(np.maximum(np.abs(d_ext), 1.0)))

    e0 = 0.0 if normalize else float(np.sqrt(max(E0, 0.0)))
    chain = np.concatenate([[e0], np.column_stack([e_minus, e_plus]).ravel()])
    if np.any(np.diff(chain) < 0.0) or np.any(e_plus[:-1] >= e_minus[1:]) \
            or np.any(e_ext < e_minus) or np.any(e_ext > e_plus):
        logger.error("Interlacing violated by refined edges")
        raise InterlacingError("refined band edges violate interlacing")
    band_lengths = np.concatenate([[e_minus[0] - e0], e_minus[1:] - e_plus[:-1]])
    s_min = float(np.min(band_lengths))

    tables = _gap_tables(op, ns, e_minus, e_plus, degenerate, integrator, config)
    M = np.array([0.0 if t is None else t.mass for t in tables])

    P: Tuple[float, ...] = ()
    tp = op.trace_potential()
    if tp is not None:
        P = tuple(coefficients_P(tp, min(4, max_available_P(tp))))

    logger.info(f"Found {n_gaps} gaps, {live.size - int(np.sum(collapsed))} resolved; s_min = {s_min:.6g}")
    logger.debug(f"Band lengths: {band_lengths}")
    return BandStructure(operator=op, normalized=normalize, E0=E0, n_gaps=n_gaps,
                         E_minus=e_minus ** 2, E_plus=e_plus ** 2, e_minus=e_minus, e_plus=e_plus,
                         e_max=e_ext, h=h, M=M, degenerate=degenerate, s_min=s_min,
                         tables=tables, P=P, z_limit=float(zs[crossings[n_gaps]]),
                         integrator=integrator, config=config)


def _gap_tables(op, ns, e_minus, e_plus, degenerate, integrator, config) -> Tuple[Optional[GapTable], ...]:
    """v(t + i0) = arccosh|Delta(t)| on Chebyshev-type nodes t = c + r cos(theta_k)."""
    K = config.nodes_per_gap
    theta = np.arange(1, K + 1) * np.pi / (K + 1)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    live = np.nonzero(~degenerate)[0]
    out: List[Optional[GapTable]] = [None] * len(ns)
    if live.size == 0:
        return tuple(out)
    c = 0.5 * (e_minus[live] + e_plus[live])
    r = 0.5 * (e_plus[live] - e_minus[live])
    nodes = c[:, None] + r[:, None] * cos_t[None, :]
    delta, _ = _lyapunov(op, nodes.ravel(), integrator)
    v = np.arccosh(np.maximum(np.abs(delta), 1.0)).reshape(nodes.shape)
    weights = (np.pi / (K + 1)) * r[:, None] * sin_t[None, :] * v
    for row, i in enumerate(live):
        out[i] = GapTable(n=int(ns[i]), e_minus=float(e_minus[i]), e_plus=float(e_plus[i]),
                          nodes=nodes[row], weights=weights[row], v=v[row])
    return tuple(out)


def _gap_index(bands: BandStructure, n: int) -> int:
    if not 1 <= n <= bands.n_gaps:
        raise SpectrumError(f"gap index {n} outside 1..{bands.n_gaps}")
    return n - 1


def gap_height(bands: BandStructure, n: int) -> Tuple[float, float]:
    """(e_n, h_n); a degenerate gap returns (midpoint, 0)."""
    i = _gap_index(bands, n)
    if bands.degenerate[i]:
        return float(0.5 * (bands.e_minus[i] + bands.e_plus[i])), 0.0
    return float(bands.e_max[i]), float(bands.h[i])


def v_on_gap(bands: BandStructure, n: int, t):
    """v(t + i0) = arccosh|Delta(t)| for t in the closed gap g_n."""
    i = _gap_index(bands, n)
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = bands.e_minus[i], bands.e_plus[i]
    if np.any(ta < lo) or np.any(ta > hi):
        raise GapDomainError(f"points outside the closed gap g_{n} = [{lo:.15g}, {hi:.15g}]")
    out = np.zeros(ta.shape)
    interior = (ta > lo) & (ta < hi)
    if np.any(interior):
        delta, _ = _lyapunov(bands.operator, ta[interior], bands.integrator)
        out[interior] = np.arccosh(np.maximum(np.abs(delta), 1.0))
    return float(out[0]) if np.ndim(t) == 0 else out


def v_model(bands: BandStructure, n: int, t) -> np.ndarray:
    """|v_n(t)| = sqrt|(t - e_n^-)(e_n^+ - t)|."""
    i = _gap_index(bands, n)
    ta = np.asarray(t, dtype=float)
    return np.sqrt(np.abs((ta - bands.e_minus[i]) * (bands.e_plus[i] - ta)))


@dataclass(frozen=True)
class GapMoments:
    """Gap masses and moments Q_m with tail bounds for the gaps beyond N."""
    M: np.ndarray
    Q: Tuple[float, ...]
    Q_tail: Tuple[float, ...]
    M_tail: float


def _finite_moments(bands: BandStructure, m_max: int) -> List[float]:
    out = []
    for m in range(m_max + 1):
        if m % 2:
            out.append(0.0)
            continue
        total = sum(float(np.sum(t.weights * t.nodes ** m)) for t in bands.live_tables())
        out.append(2.0 * total / np.pi)
    return out


def moment_tail(bands: BandStructure, j: int, finite: Optional[Sequence[float]] = None) -> float:
    """
    Bound on the contribution of gaps beyond N to Q_j (j even).

    Uses Q_{j+2} = P_{j/2}: the missing part of Q_{j+2} divided by e_N^2.
    """
    if j % 2:
        return 0.0
    pj = bands.trace_coefficient(j // 2)
    if pj is None:
        return float("inf")
    qs = finite if finite is not None and len(finite) > j + 2 else _finite_moments(bands, j + 2)
    eN = float(bands.e_plus[-1])
    return max(pj - qs[j + 2], 0.0) / eN ** 2


def gap_mass_and_moments(bands: BandStructure, m_max: int) -> GapMoments:
    """M_n per gap, Q_0..Q_{m_max} (odd ones exactly 0) and their tail bounds."""
    if m_max < 0:
        raise SpectrumError(f"m_max must be non-negative, got {m_max}")
    finite = _finite_moments(bands, m_max + 2)
    tails = tuple(moment_tail(bands, j, finite) for j in range(m_max + 1))
    return GapMoments(M=bands.M.copy(), Q=tuple(finite[:m_max + 1]), Q_tail=tails,
                      M_tail=0.5 * moment_tail(bands, 0, finite))


def _mirrored_tables(bands: BandStructure) -> List[Tuple[int, int, np.ndarray, np.ndarray]]:
    """(n, side, nodes, weights) for every live gap and its mirror image."""
    out = []
    for t in bands.live_tables():
        out.append((t.n, 1, t.nodes, t.weights))
        out.append((t.n, -1, -t.nodes, t.weights))
    return out


def y_integral(pieces, e_minus: float, e_plus: float, t) -> np.ndarray:
    """(1/pi) sum over pieces of W / (|v_n(tau)| |tau - t|) for nodes tau outside g_n."""
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    total = np.zeros(ta.shape)
    for nodes, weights in pieces:
        vn = np.sqrt(np.abs((nodes - e_minus) * (e_plus - nodes)))
        total += np.sum(weights[None, :] / (vn[None, :] * np.abs(nodes[None, :] - ta[:, None])), axis=1)
    return total / np.pi


def Y_n_function(bands: BandStructure, n: int, t) -> Tuple[np.ndarray, np.ndarray]:
    """
    Y_n(t) on the gap g_n by two routes.

    Returns:
        (Y_direct, Y_integral); Y_direct = v/v_n - 1 is nan at the edges.
    """
    i = _gap_index(bands, n)
    if bands.degenerate[i]:
        raise GapDomainError(f"gap g_{n} is degenerate")
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = bands.e_minus[i], bands.e_plus[i]
    pieces = [(nodes, w) for (m, side, nodes, w) in _mirrored_tables(bands) if not (m == n and side == 1)]
    y_int = y_integral(pieces, lo, hi, ta)
    v = v_on_gap(bands, n, ta)
    vn = v_model(bands, n, ta)
    with np.errstate(divide="ignore", invalid="ignore"):
        y_dir = np.where(vn > 0.0, v / vn - 1.0, np.nan)
    return y_dir, y_int


def Y_n_max(bands: BandStructure, n: int, points: int = 33) -> float:
    """Y_n^0: max of the integral form over a uniform grid of the closed gap."""
    i = _gap_index(bands, n)
    ts = np.linspace(bands.e_minus[i], bands.e_plus[i], points)
    pieces = [(nodes, w) for (m, side, nodes, w) in _mirrored_tables(bands) if not (m == n and side == 1)]
    return float(np.max(y_integral(pieces, bands.e_minus[i], bands.e_plus[i], ts)))


def comb_sum(masses: Sequence[float], s: float, n: int, r: float) -> float:
    """
    sum_{j in Z} M_j / |n - j|_1 with M_{-j} = M_j, M_0 = 0,
    |k|_1 = s|k| for k != 0 and r/2 for k = 0.
    """
    if r <= 0.0:
        raise SpectrumError(f"r must be positive, got {r}")
    total = 0.0
    for j, mass in enumerate(masses, start=1):
        if mass == 0.0:
            continue
        total += mass / (0.5 * r if j == n else s * abs(n - j))
        total += mass / (s * (n + j))
    return float(total)


def S_n_sum(bands: BandStructure, n: int, r: float) -> float:
    return comb_sum(bands.M, bands.s_min, n, r)


def y_bound_213(bands: BandStructure, n: int, M_tail: float = 0.0) -> float:
    """sum_{j != n} M_j / (s^2 |n - j|^2) over j in Z, plus the tail mass beyond N."""
    s2 = bands.s_min ** 2
    total = 0.0
    for j, mass in enumerate(bands.M, start=1):
        if j != n:
            total += mass / (s2 * (n - j) ** 2)
        total += mass / (s2 * (n + j) ** 2)
    gap_after = max(bands.n_gaps + 1 - n, 1)
    return float(total + 2.0 * M_tail / (s2 * gap_after ** 2))


def comb_inequalities(bands: BandStructure, slack: float = 1e-9) -> Dict[str, object]:
    """
    Check |g_n| <= 2 h_n, ||h||_inf^2 <= 2 Q_0 and the two Y_n^0 bounds on every resolved gap.

    Returns:
        Report dict with per-gap rows and an overall 'passed' flag.
    """
    moments = gap_mass_and_moments(bands, 2)
    Q0 = moments.Q[0] + moments.Q_tail[0]
    Q2 = moments.Q[2] + moments.Q_tail[2]
    s = bands.s_min
    rows = []
    ok = True
    for n in bands.resolved:
        i = n - 1
        gap = float(bands.gap_lengths[i])
        y0 = Y_n_max(bands, int(n))
        b213 = y_bound_213(bands, int(n), moments.M_tail)
        b214 = 4.0 * Q2 / (n ** 2 * s ** 4)
        row = {"n": int(n), "gap": gap, "h": float(bands.h[i]),
               "gap_le_2h": gap <= 2.0 * bands.h[i] + slack,
               "Y0": y0, "bound_2_13": b213, "bound_2_14": b214,
               "Y0_le_2_13": y0 <= b213 + slack, "Y0_le_2_14": y0 <= b214 + slack}
        ok = ok and row["gap_le_2h"] and row["Y0_le_2_13"] and row["Y0_le_2_14"]
        rows.append(row)
    h_inf = float(np.max(bands.h)) if bands.h.size else 0.0
    h_ok = h_inf ** 2 <= 2.0 * Q0 + slack
    trend = None
    if bands.n_gaps > 1:
        first = abs(bands.e_minus[0] - np.pi) + abs(bands.e_plus[0] - np.pi)
        last = abs(bands.e_minus[-1] - np.pi * bands.n_gaps) + abs(bands.e_plus[-1] - np.pi * bands.n_gaps)
        trend = bool(last < first)
    return {"rows": rows, "h_inf_sq": h_inf ** 2, "two_Q0": 2.0 * Q0, "h_inf_sq_le_2Q0": h_ok,
            "edge_trend_to_pi_n": trend, "passed": bool(ok and h_ok)}
