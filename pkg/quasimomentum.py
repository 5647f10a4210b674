#!/usr/bin/env python3
"""
quasimomentum.py

The quasimomentum map k(z) and its high-energy remainders.

- k_direct: arccos Delta(z) on the branch anchored to the bands
  (real axis) and continued upward along vertical paths.
- k_integral: z + (1/pi) sum over gaps of v(t)/(t - z), from the gap tables.
- remainder_f: f_{m+1} = k - z + K_m by both routes.
- verify_thm_1_1: sector slope, strip bound, gap-edge sharpness and
  edge-value checks, assembled into one report.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from monodromy import integrate_batch
from spectrum import (BandStructure, GapDomainError, GapMoments, comb_inequalities,
                      Y_n_max, gap_mass_and_moments, moment_tail, v_on_gap)


class QuasimomentumError(Exception):
    """Base exception for quasimomentum errors."""
    pass


class ZeroMomentumError(QuasimomentumError):
    """Raised when a high-energy quantity is requested at z = 0."""
    pass


SIGN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuasimomentumMap:
    """Band data plus the comb moments needed by both constructions of k."""
    bands: BandStructure
    moments: GapMoments

    @property
    def N(self) -> int:
        return self.bands.n_gaps

    @property
    def Q0(self) -> float:
        """Finite-gap Q_0 plus its tail bound (an upper bound on the full Q_0)."""
        return self.moments.Q[0] + self.tail_bound

    @property
    def tail_bound(self) -> float:
        return self.moments.Q_tail[0]

    @property
    def v_tables(self):
        return self.bands.live_tables()


def build_map(bands: BandStructure, m_max: int = 8) -> QuasimomentumMap:
    moments = gap_mass_and_moments(bands, m_max)
    logger.debug(f"Quasimomentum map: Q0 = {moments.Q[0]:.6g}, tail <= {moments.Q_tail[0]:.3g}")
    return QuasimomentumMap(bands, moments)


@dataclass(frozen=True)
class IntegralEstimate:
    """Value from gap quadrature with a bound on the gaps beyond N."""
    value: np.ndarray
    tail: np.ndarray
    dist: np.ndarray
    inaccurate: np.ndarray


@dataclass(frozen=True)
class RemainderPair:
    """f_{m+1}(z) by definition (k - z + K_m) and by gap quadrature."""
    f_def: np.ndarray
    f_int: np.ndarray
    tail: np.ndarray


def _gap_intervals(bands: BandStructure) -> Tuple[np.ndarray, np.ndarray]:
    live = ~bands.degenerate
    lo, hi = bands.e_minus[live], bands.e_plus[live]
    return np.concatenate([lo, -hi]), np.concatenate([hi, -lo])


def distance_to_gaps(qmap: QuasimomentumMap, z, include_tail: bool = True) -> np.ndarray:
    """dist(z, g) for the computed gaps; include_tail also counts |t| >= e_N^+ as gap."""
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    x, y = za.real, np.abs(za.imag)
    lo, hi = _gap_intervals(qmap.bands)
    d = np.full(za.shape, np.inf)
    for a, b in zip(lo, hi):
        dx = np.maximum.reduce([a - x, np.zeros_like(x), x - b])
        d = np.minimum(d, np.hypot(dx, y))
    if include_tail:
        eN = float(qmap.bands.e_plus[-1])
        d = np.minimum(d, np.hypot(np.maximum(eN - np.abs(x), 0.0), y))
    return d


def _tail_distance(qmap: QuasimomentumMap, za: np.ndarray) -> np.ndarray:
    eN = float(qmap.bands.e_plus[-1])
    return np.hypot(np.maximum(eN - np.abs(za.real), 0.0), za.imag)


def _open_gap_index(bands: BandStructure, x: np.ndarray) -> np.ndarray:
    """1-based gap index when x lies in an open non-degenerate gap, else 0."""
    idx = np.zeros(x.shape, dtype=int)
    for i in np.nonzero(~bands.degenerate)[0]:
        idx[(x > bands.e_minus[i]) & (x < bands.e_plus[i])] = i + 1
    return idx


def _k_real(qmap: QuasimomentumMap, x: np.ndarray) -> np.ndarray:
    """k on the non-negative real axis outside the open gaps."""
    bands = qmap.bands
    if np.any(_open_gap_index(bands, x) > 0):
        raise GapDomainError("k is two-valued inside a gap; use k_on_gap_rim")
    out = np.empty(x.shape, dtype=complex)
    beyond = x > bands.z_limit
    if np.any(beyond):
        logger.debug(f"{int(np.sum(beyond))} real points beyond the last crossing; using gap quadrature")
        out[beyond] = k_integral(qmap, x[beyond].astype(complex)).value.real
    inside = ~beyond
    if np.any(inside):
        xs = x[inside]
        delta = integrate_batch(bands.operator, xs, bands.integrator).delta.real
        n = 1 + np.searchsorted(bands.e_minus, xs, side="left")
        sign = np.where(n % 2 == 1, 1.0, -1.0)
        k = (n - 1) * np.pi + np.arccos(np.clip(sign * delta, -1.0, 1.0))
        below = xs < bands.e0
        k = k.astype(complex)
        k[below] = 1j * np.arccosh(np.maximum(delta[below], 1.0))
        out[inside] = k
    return out


def _nearest_branch(w: complex, target: complex) -> complex:
    """Among +-w + 2 pi j, the candidate closest to target with Im >= 0 when decidable."""
    signs = (1.0,) if w.imag > SIGN_TOL else (-1.0,) if w.imag < -SIGN_TOL else (1.0, -1.0)
    best, best_err = None, np.inf
    for s in signs:
        c = s * w
        j = np.round((target.real - c.real) / (2 * np.pi))
        cand = c + 2 * np.pi * j
        err = abs(cand - target)
        if err < best_err:
            best, best_err = cand, err
    return complex(best)


def _k_anchor(qmap: QuasimomentumMap, a: np.ndarray) -> np.ndarray:
    """Boundary values k(a + i0) for real a >= 0, gaps included."""
    out = np.empty(a.shape, dtype=complex)
    gap = _open_gap_index(qmap.bands, a)
    for n in np.unique(gap[gap > 0]):
        sel = gap == n
        out[sel] = np.pi * n + 1j * np.atleast_1d(v_on_gap(qmap.bands, int(n), a[sel]))
    rest = gap == 0
    if np.any(rest):
        out[rest] = _k_real(qmap, a[rest])
    return out


def _k_upper(qmap: QuasimomentumMap, z: np.ndarray) -> np.ndarray:
    """k for Re z >= 0, Im z > 0."""
    bands = qmap.bands
    delta = integrate_batch(bands.operator, z, bands.integrator).delta
    w = np.arccos(delta.astype(complex))
    out = np.empty(z.shape, dtype=complex)
    quick = qmap.Q0 / distance_to_gaps(qmap, z) <= 0.5
    for i in np.nonzero(quick)[0]:
        out[i] = _nearest_branch(w[i], z[i] - qmap.Q0 / z[i])
    slow = np.nonzero(~quick)[0]
    if slow.size == 0:
        return out

    anchors = _k_anchor(qmap, z[slow].real)
    counts = [max(8, int(np.ceil(4 * z[i].imag))) for i in slow]
    points = np.concatenate([z[i].real + 1j * z[i].imag * np.arange(1, c + 1) / c
                             for i, c in zip(slow, counts)])
    path_w = np.arccos(integrate_batch(bands.operator, points, bands.integrator).delta.astype(complex))
    pos = 0
    for i, anchor, c in zip(slow, anchors, counts):
        prev, prev2 = anchor, None
        for j in range(c):
            guess = prev if prev2 is None else 2 * prev - prev2
            value = _nearest_branch(path_w[pos + j], guess)
            prev2, prev = prev, value
        out[i] = prev
        pos += c
    logger.debug(f"Path-tracked {slow.size} of {z.size} points")
    return out


def k_direct(qmap: QuasimomentumMap, z):
    """
    k(z) = arccos Delta(z) on the branch with k(z) = z + o(1), Im k > 0 in C_+.

    Real points use the band formula (n-1) pi + arccos((-1)^{n-1} Delta); lower
    half-plane and negative real parts follow from k(-z) = -k(z) = conj k(conj z).

    Raises:
        GapDomainError: z is real and inside an open gap.
    """
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    flip_im = za.imag < 0
    w = np.where(flip_im, za.conj(), za)
    flip_re = w.real < 0
    w = np.where(flip_re, -w.conj(), w)
    out = np.empty(w.shape, dtype=complex)
    real = w.imag == 0
    if np.any(real):
        out[real] = _k_real(qmap, w[real].real)
    if np.any(~real):
        out[~real] = _k_upper(qmap, w[~real])
    out = np.where(flip_re, -out.conj(), out)
    out = np.where(flip_im, out.conj(), out)
    return complex(out[0]) if np.ndim(z) == 0 else out


def k_on_gap_rim(qmap: QuasimomentumMap, n: int, t, side: int = 1):
    """k(t +- i0) = pi n +- i v(t) on the closed gap g_n."""
    if side not in (1, -1):
        raise QuasimomentumError(f"side must be +1 or -1, got {side}")
    if qmap.bands.degenerate[n - 1]:
        raise GapDomainError(f"gap g_{n} is degenerate")
    return np.pi * n + side * 1j * v_on_gap(qmap.bands, n, t)


def k_integral(qmap: QuasimomentumMap, z) -> IntegralEstimate:
    """
    k(z) = z + (1/pi) * integral over g of v(t)/(t - z), mirrored gaps folded in.

    Returns:
        IntegralEstimate with the value, the tail bound Q_0^tail/dist(z, |t| >= e_N^+)
        and a flag for points closer than 1e-6 to a computed gap.
    """
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    total = np.zeros(za.shape, dtype=complex)
    z2 = za * za
    for table in qmap.v_tables:
        kernel = 2.0 * za[:, None] / (table.nodes[None, :] ** 2 - z2[:, None])
        total += kernel @ table.weights
    value = za + total / np.pi
    dist = distance_to_gaps(qmap, za, include_tail=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(qmap.tail_bound > 0, qmap.tail_bound / _tail_distance(qmap, za), 0.0)
    inaccurate = dist < 1e-6
    if np.any(inaccurate):
        logger.warning(f"{int(np.sum(inaccurate))} points within 1e-6 of a gap; quadrature accuracy degraded")
    if np.ndim(z) == 0:
        return IntegralEstimate(complex(value[0]), float(tail[0]), float(dist[0]), bool(inaccurate[0]))
    return IntegralEstimate(value, tail, dist, inaccurate)


def K_from_P(P: Sequence[float], m: int, z):
    """K_m(z) = sum_{j=-1}^{m-1} P_j / z^{2j+3}."""
    if len(P) < m + 1:
        raise QuasimomentumError(f"K_{m} needs P_-1..P_{m - 1}, only {len(P)} available")
    za = np.asarray(z, dtype=complex)
    total = np.zeros(za.shape, dtype=complex)
    for idx in range(m + 1):
        total = total + P[idx] / za ** (2 * idx + 1)
    return total


def remainder_f(qmap: QuasimomentumMap, m: int, z) -> RemainderPair:
    """f_{m+1}(z) = k(z) - z + K_m(z) from k_direct and from the gap quadrature."""
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(za == 0):
        raise ZeroMomentumError("remainder f is undefined at z = 0")
    L = 2 * m + 2
    f_def = np.atleast_1d(k_direct(qmap, za)) - za + K_from_P(qmap.bands.P, m, za)
    z2 = za * za
    total = np.zeros(za.shape, dtype=complex)
    for table in qmap.v_tables:
        kernel = (2.0 * za[:, None] / (table.nodes[None, :] ** 2 - z2[:, None])) * table.nodes[None, :] ** L
        total += kernel @ table.weights
    f_int = total / np.pi / za ** L
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = moment_tail(qmap.bands, L) / (np.abs(za) ** L * _tail_distance(qmap, za))
    tail = np.nan_to_num(tail, nan=0.0, posinf=np.inf)
    if np.ndim(z) == 0:
        return RemainderPair(complex(f_def[0]), complex(f_int[0]), float(tail[0]))
    return RemainderPair(f_def, f_int, tail)


def integrated_density_of_states(qmap: QuasimomentumMap, x):
    """Re k(x)/pi on the real axis; constant n across the gap g_n."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ax = np.abs(xa)
    out = np.empty(xa.shape)
    gap = _open_gap_index(qmap.bands, ax)
    out[gap > 0] = gap[gap > 0]
    rest = gap == 0
    if np.any(rest):
        out[rest] = _k_real(qmap, ax[rest]).real / np.pi
    out = np.sign(xa) * out
    return float(out[0]) if np.ndim(x) == 0 else out


def fit_loglog(x, y) -> Tuple[float, float]:
    """Least-squares slope and intercept of log y against log x."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def sample_domain(qmap: QuasimomentumMap, count: int, re_max: float, im_max: float, eps: float,
                  seed: int, min_abs: float = 0.0) -> np.ndarray:
    """
    Uniform points of the strip |Re z| <= re_max, |Im z| <= im_max at distance >= eps
    from the computed gaps and from collapsed gap points.
    """
    rng = np.random.default_rng(seed)
    re_max = min(re_max, qmap.bands.z_limit - eps)
    collapsed = qmap.bands.e_max[qmap.bands.degenerate]
    collapsed = np.concatenate([collapsed, -collapsed])
    chosen: List[np.ndarray] = []
    have = 0
    for _ in range(100):
        zs = rng.uniform(-re_max, re_max, 4 * count) + 1j * rng.uniform(-im_max, im_max, 4 * count)
        ok = distance_to_gaps(qmap, zs, include_tail=False) >= eps
        if collapsed.size:
            ok &= np.min(np.abs(zs[:, None] - collapsed[None, :]), axis=1) >= eps
        ok &= np.abs(zs) >= max(min_abs, 1e-3)
        chosen.append(zs[ok])
        have += int(np.sum(ok))
        if have >= count:
            break
    out = np.concatenate(chosen)[:count]
    if out.size < count:
        raise QuasimomentumError(f"could only place {out.size} of {count} sample points")
    return out


def route_equivalence(qmap: QuasimomentumMap, zs, abs_tol: float = 1e-6) -> Dict[str, object]:
    """max |k_direct - k_integral| against tail + abs_tol over the given points."""
    zs = np.asarray(zs, dtype=complex)
    kd = k_direct(qmap, zs)
    ki = k_integral(qmap, zs)
    diff = np.abs(kd - ki.value)
    allowed = ki.tail + abs_tol
    worst = int(np.argmax(diff - allowed))
    return {"points": int(zs.size), "max_discrepancy": float(np.max(diff)),
            "max_tail": float(np.max(ki.tail)), "worst_z": [float(zs[worst].real), float(zs[worst].imag)],
            "passed": bool(np.all(diff <= allowed))}


def check_high_energy(qmap: QuasimomentumMap, ys: Sequence[float] = (20.0, 40.0, 80.0, 160.0)) -> Dict[str, object]:
    """k(iy) = iy - Q_0/(iy) - (Q_2 + o(1))/(iy)^3 along the imaginary axis."""
    ys = np.asarray(ys, dtype=float)
    z = 1j * ys
    k = k_integral(qmap, z).value
    q0, q2 = qmap.moments.Q[0], qmap.moments.Q[2]
    first = (k - z) * z
    second = ((k - z) * z + q0) * z * z
    rows = [{"y": float(y), "first_coefficient": float(a.real), "second_coefficient": float(b.real)}
            for y, a, b in zip(ys, first, second)]
    err0 = float(np.max(np.abs(first + q0)))
    err2 = float(np.max(np.abs(second + q2)))
    scale0 = max(abs(q0), 1e-300)
    scale2 = max(abs(q2), 1e-300)
    return {"Q0": q0, "Q2": q2, "rows": rows, "rel_error_Q0": err0 / scale0 if q0 else err0,
            "rel_error_Q2": err2 / scale2 if q2 else err2}


def sobolev_gap_diagnostic(qmap: QuasimomentumMap, m: int) -> Dict[str, object]:
    """
    sum_n (2 pi n)^(2m) |gamma_n|^2 / 2 against ||p^(m)||^2 for mean-zero p.

    The two agree to leading order for small potentials; reported, not asserted.
    """
    tp = qmap.bands.operator.trace_potential()
    if tp is None:
        return {"skipped": True}
    p = tp.shifted(-tp.mean)
    n = np.arange(1, qmap.N + 1)
    gaps = qmap.bands.gamma_lengths
    comb_side = float(0.5 * np.sum((2 * np.pi * n) ** (2 * m) * gaps ** 2))
    norm = p.sobolev_norm_sq(m)
    return {"skipped": False, "m": m, "gap_sum": comb_side, "norm_sq": norm,
            "ratio": comb_side / norm if norm > 0 else None, "resolved_in_H_m": p.in_sobolev(m)}


def check_gap_edge_values(qmap: QuasimomentumMap, m: int, slack: float = 1e-9) -> Dict[str, object]:
    """
    Edge values and rim extremes of f_{m+1} on each resolved gap.

    f is real at e_n^+- with f(e^-) ~ +|g_n|/2 and f(e^+) ~ -|g_n|/2; on the rim
    Im f = +-v, so max |Im f| = h_n; Re f decreases along the gap once K_m' < 1.
    """
    bands = qmap.bands
    P = bands.P[:m + 1]
    threshold = 2.0 * np.sqrt((m + 1) * max((abs(x) for x in P), default=0.0))
    rows = []
    ok = True
    for table in bands.live_tables():
        n = table.n
        i = n - 1
        em, ep = table.e_minus, table.e_plus
        f_m = float((np.pi * n - em + K_from_P(bands.P, m, em)).real)
        f_p = float((np.pi * n - ep + K_from_P(bands.P, m, ep)).real)
        gap = ep - em
        gamma = bands.E_plus[i] - bands.E_minus[i]
        re_f = (np.pi * n - table.nodes + K_from_P(bands.P, m, table.nodes)).real
        im_ok = float(np.max(table.v)) <= bands.h[i] + slack
        checked = bool(em >= threshold)
        extreme_at_edges = bool(np.all(re_f <= f_m + slack) and np.all(re_f >= f_p - slack))
        window = abs(max(abs(f_m), abs(f_p)) - gap / 2)
        Y0 = Y_n_max(bands, n)
        C_emp = float(window / (gap * Y0)) if Y0 > 0.0 else None
        row = {"n": n, "gap": gap, "f_e_minus": f_m, "f_e_plus": f_p,
               "ratio_minus": f_m * 4 * np.pi * n / gamma, "ratio_plus": -f_p * 4 * np.pi * n / gamma,
               "ratio_symmetric": (f_m - f_p) * 2 * np.pi * n / gamma,
               "literal_ratio_minus": f_m * 2 * np.pi * n / gamma,
               "max_im_f": float(np.max(table.v)), "h": float(bands.h[i]), "im_le_h": im_ok,
               "monotone_checked": checked,
               "re_f_decreases": bool(f_m > f_p) if checked else None,
               "extreme_at_edges": extreme_at_edges if checked else None,
               "max_abs_f_window": float(max(abs(f_m), abs(f_p)) - gap / 2),
               "Y0": Y0, "C_empirical": C_emp}
        ok = ok and im_ok and (not checked or (f_m > f_p and extreme_at_edges))
        rows.append(row)
    if threshold > 0:
        logger.debug(f"Monotonicity of Re f asserted only for e_n^- >= {threshold:.4g}")
    constants = [r["C_empirical"] for r in rows if r["C_empirical"] is not None]
    return {"rows": rows, "monotone_threshold": float(threshold), "C_max": max(constants, default=None),
            "passed": bool(ok)}


@dataclass
class AsymptoticsConfig:
    """Sampling and acceptance windows for the quasimomentum asymptotics suite."""
    y_min: float = 20.0
    y_max: float = 200.0
    n_y: int = 12
    sector_rays: int = 3
    sector_slope_A: float = 1.0
    strip_points: int = 200
    strip_re_max: float = 30.0
    strip_r: float = 1.0
    route_im_max: float = 3.0
    eps: float = 0.1
    seed: int = 12345
    slope_window: float = 0.3
    prefactor_rel: float = 0.10
    ratio_low: float = 0.5
    ratio_high: float = 1.5
    route_abs: float = 1e-6
    max_sharp_gaps: int = 5
    min_sharp_gaps: int = 3
    noise_rel: float = 1e-11
    monotone_slack: float = 0.1


def _sector_test(qmap: QuasimomentumMap, m: int, cfg: AsymptoticsConfig) -> Dict[str, object]:
    ys = np.geomspace(cfg.y_min, cfg.y_max, cfg.n_y)
    expected = -(2 * m + 3)
    if not qmap.v_tables:
        return {"trivial": True, "expected_slope": expected, "passed": True}
    res = remainder_f(qmap, m, 1j * ys)
    mag = np.abs(res.f_int)
    slope, _ = fit_loglog(ys, mag)
    prefactor = res.f_int * (1j * ys) ** (2 * m + 3)
    Pm = qmap.bands.trace_coefficient(m)
    pref_err = None if Pm is None or Pm == 0 else float(abs(prefactor[-1].real + Pm) / abs(Pm))

    # f_def = k - z + K_m cancels to round-off of order noise_rel * |z|
    floor = cfg.noise_rel * ys
    mismatch = np.abs(res.f_def - res.f_int)
    agree = bool(np.all(mismatch <= res.tail + floor))
    above = np.abs(res.f_def) > 10.0 * floor
    def_slope = fit_loglog(ys[above], np.abs(res.f_def[above]))[0] if np.sum(above) >= 3 else None
    if def_slope is None:
        logger.debug("f_def sits at round-off on the sector; slope fit skipped")
    def_ok = def_slope is None or abs(def_slope - expected) <= cfg.slope_window

    rays = []
    for r in range(1, cfg.sector_rays):
        x = ys * r / (cfg.sector_rays * cfg.sector_slope_A)
        f_ray = remainder_f(qmap, m, x + 1j * ys).f_int
        rays.append({"re_over_im": float(r / (cfg.sector_rays * cfg.sector_slope_A)),
                     "slope": fit_loglog(np.abs(x + 1j * ys), np.abs(f_ray))[0]})
    slope_ok = abs(slope - expected) <= cfg.slope_window
    pref_ok = pref_err is None or pref_err <= cfg.prefactor_rel
    return {"trivial": False, "expected_slope": expected, "slope": slope, "P_m": Pm,
            "prefactor": [float(prefactor[-1].real), float(prefactor[-1].imag)],
            "prefactor_rel_error": pref_err, "tail": float(np.max(res.tail)), "rays": rays,
            "f_def_slope": def_slope, "f_def_points": int(np.sum(above)),
            "max_route_mismatch": float(np.max(mismatch)), "routes_agree": agree,
            "passed": bool(slope_ok and pref_ok and def_ok and agree)}


def _strip_test(qmap: QuasimomentumMap, m: int, cfg: AsymptoticsConfig) -> Dict[str, object]:
    L = 2 * m + 2
    zs = sample_domain(qmap, cfg.strip_points, cfg.strip_re_max, cfg.strip_r, cfg.eps, cfg.seed + 1, min_abs=5.0)
    f = remainder_f(qmap, m, zs).f_def
    lhs = np.abs(zs ** L * f)
    QL = qmap.moments.Q[L] + moment_tail(qmap.bands, L) if L < len(qmap.moments.Q) else np.inf
    bound = QL / distance_to_gaps(qmap, zs) + cfg.route_abs * np.abs(zs) ** L
    ratio = lhs / bound
    return {"points": int(zs.size), "Q_L": float(QL), "max_scaled_remainder": float(np.max(lhs)),
            "max_ratio_to_bound": float(np.max(ratio)), "passed": bool(np.all(lhs <= bound))}


def _sharpness_test(edges: Dict[str, object], cfg: AsymptoticsConfig) -> Dict[str, object]:
    rows = sorted(edges["rows"], key=lambda r: -r["gap"])[:cfg.max_sharp_gaps]
    if len(rows) < cfg.min_sharp_gaps:
        logger.warning(f"Sharpness test skipped: only {len(rows)} resolved gaps")
        return {"skipped": True, "resolved": len(rows), "passed": True}
    rows = sorted(rows, key=lambda r: r["n"])
    ratios = [r["ratio_symmetric"] for r in rows]
    ok = all(cfg.ratio_low <= x <= cfg.ratio_high for x in ratios)
    offsets = [abs(x - 1.0) for x in ratios]
    approaching = all(b <= a + cfg.monotone_slack for a, b in zip(offsets, offsets[1:]))
    return {"skipped": False, "n": [r["n"] for r in rows], "ratio_symmetric": ratios,
            "ratio_minus": [r["ratio_minus"] for r in rows], "ratio_plus": [r["ratio_plus"] for r in rows],
            "literal_ratio_minus": [r["literal_ratio_minus"] for r in rows],
            "window": [cfg.ratio_low, cfg.ratio_high], "approaching_one": bool(approaching),
            "passed": bool(ok and approaching)}


def verify_thm_1_1(qmap: QuasimomentumMap, m: int, config: Optional[AsymptoticsConfig] = None) -> Dict[str, object]:
    """
    High-energy remainder suite for order m.

    Returns:
        Report dict; 'failures' names the asserted sections that did not pass.
    """
    cfg = config or AsymptoticsConfig()
    logger.info(f"Verifying remainder asymptotics for m = {m} over {qmap.N} gaps")
    edges = check_gap_edge_values(qmap, m)
    route_pts = sample_domain(qmap, cfg.strip_points, cfg.strip_re_max, cfg.route_im_max, cfg.eps, cfg.seed)
    report = {
        "m": m,
        "n_gaps": qmap.N,
        "resolved_gaps": [int(n) for n in qmap.bands.resolved],
        "Q": list(qmap.moments.Q),
        "Q_tail": list(qmap.moments.Q_tail),
        "sector": _sector_test(qmap, m, cfg),
        "strip": _strip_test(qmap, m, cfg),
        "sharpness": _sharpness_test(edges, cfg),
        "edges": edges,
        "route_equivalence": route_equivalence(qmap, route_pts, cfg.route_abs),
        "high_energy": check_high_energy(qmap),
        "comb": comb_inequalities(qmap.bands),
        "sobolev": sobolev_gap_diagnostic(qmap, m),
    }
    report["failures"] = [name for name in ("sector", "strip", "sharpness", "edges", "route_equivalence", "comb")
                          if not report[name]["passed"]]
    report["passed"] = not report["failures"]
    if report["failures"]:
        logger.warning(f"Remainder suite failures: {report['failures']}")
    return report
