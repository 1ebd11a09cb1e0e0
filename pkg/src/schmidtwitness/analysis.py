"""Noise thresholds, worst-case overlap analysis, concentration and Welch checks.

Scan helpers return lists of dicts (one per grid point); the CLI writes them
as CSV.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import comb

from . import numtheory as nt
from .bases import random_basis
from .errors import Infeasible, InfeasibleNoise, NotOddPrime
from .states import tau_thermal
from .witness import loose_bounds, loose_omega

EULER_GAMMA = 0.5772156649015329
LEVY_CONST = 18 * math.pi**3 * math.log(2)


# ---------------------------------------------------------------------------
# isotropic family


def p_threshold_iso(d: int, k: int, m: int, T: float) -> float:
    """Largest white-noise ratio for which the isotropic state beats ``B_k``."""
    return max(0.0, (m - T) * (d - k) / (m * (d - 1)))


def _worst_case_report(d: int, m: int, c_min: float):
    if c_min < 0 or c_min > 1 / d + 1e-12:
        raise Infeasible(f"c_min={c_min} outside [0, 1/d]")
    c_min = min(c_min, 1 / d)
    c_max = max(c_min, 1 - (d - 1) * c_min)
    summary = {(z, w): (c_max, c_min) for z, w in itertools.permutations(range(m), 2)}
    return loose_bounds(summary, d, m)


def worst_case_T(d: int, m: int, c_min: float) -> float:
    """``T_bar`` when every pair has the least favourable ``c_max = 1 - (d-1) c_min``."""
    return _worst_case_report(d, m, c_min).T_bar


def worst_case_lambda(d: int, m: int, c_min: float) -> float:
    return _worst_case_report(d, m, c_min).lambda_bar


def cmin_no_witness_bound(d: int) -> float:
    """``c_min`` at or below which worst-case bases certify nothing, for any ``m``."""
    return (3 * d - 1 - math.sqrt(d * d + 10 * d - 7)) / (2 * d * (d - 1))


def _target_T(d: int, k: int, m: int, p: float) -> float:
    """Largest ``T`` still allowing an isotropic state at noise ``p`` to beat ``B_k``."""
    p_max = (m - 1) * (d - k) / (m * (d - 1))
    if p >= p_max:
        raise InfeasibleNoise(f"p={p} >= {p_max}: not witnessable even with MUBs")
    if p < 0:
        raise InfeasibleNoise("p must be non-negative")
    return m - p * m * (d - 1) / (d - k)


def cmin_tolerance_iso(d: int, k: int, m: int, p: float) -> float:
    """Closed-form minimum ``c_min`` (worst-case bases) that witnesses Schmidt number ``k+1``."""
    t = _target_T(d, k, m, p)
    x = (2 * t - 1) ** 2 - 1
    disc = (d + 1) ** 2 + 2 * (d - 1) * x / (m * (m - 1))
    return (3 * d - 1 - math.sqrt(disc)) / (2 * d * (d - 1))


def cmin_tolerance_numeric(d: int, k: int, m: int, p: float) -> float:
    """Same bound by root-finding ``lambda_bar(c_min) = target`` on the worst-case family."""
    t = _target_T(d, k, m, p)
    return brentq(lambda c: worst_case_lambda(d, m, c) - t, 0.0, 1 / d, xtol=1e-15, rtol=1e-14)


# ---------------------------------------------------------------------------
# thermal family with the drifted basis triple


def thermal_overlap_bounds(d: int, theta: float) -> tuple[float, float]:
    """``(c_plus, c_minus)`` for the Fourier / drifted-quadratic pair.

    The lower value is clamped at zero before squaring, otherwise it is not a
    valid lower bound once ``2|sin(theta/2)| > sqrt(d)``.
    """
    s = 2 * abs(math.sin(theta / 2))
    rd = math.sqrt(d)
    return (rd + s) ** 2 / d**2, max(0.0, rd - s) ** 2 / d**2


def thermal_T_bar(d: int, m: int, theta: float) -> float:
    if m not in (2, 3):
        raise ValueError("only m = 2 or 3 is defined for this basis triple")
    u = 1 / d
    summary = {(0, 1): (u, u)}
    if m == 3:
        summary[(0, 2)] = (u, u)
        summary[(1, 2)] = thermal_overlap_bounds(d, theta)
    return loose_bounds(summary, d, m).T_bar


def p_threshold_thermal(d: int, k: int, m: int, beta: float, theta: float) -> float:
    if d < 3 or not nt.is_prime(d):
        raise NotOddPrime(f"d={d} is not an odd prime")
    tau = tau_thermal(d, beta, m)
    t = thermal_T_bar(d, m, theta)
    val = (tau * d - k * m - (d - k) * t) / (tau * d - m)
    return float(min(1.0, max(0.0, val)))


# ---------------------------------------------------------------------------
# number of bases, concentration


def max_bases_bound(d: int, lam: float) -> float:
    return (d + 1) / 2 * (1 + math.sqrt(1 + 8 * lam * (lam - 1) / (d * d - 1)))


def welch_check(vectors, k: int = 1) -> float:
    """Slack ``sum_ij |<psi_i|psi_j>|^(2k) - M^2 / binom(d+k-1, k)`` (non-negative)."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        v = vectors
    else:
        v = np.column_stack([np.asarray(x, dtype=complex).ravel() for x in vectors])
    d, M = v.shape
    g = np.abs(v.conj().T @ v) ** (2 * k)
    return float(g.sum() - M * M / comb(d + k - 1, k, exact=True))


def levy_bound(d: int, eps: float) -> float:
    if eps <= 0:
        return 1.0
    return min(1.0, 2 * math.exp(-d * eps * eps / LEVY_CONST))


def concentration_experiment(d: int, trials: int, eps: float, seed) -> dict:
    """Haar-random basis pairs: deviation rate of squared overlaps from ``1/d``."""
    rng = np.random.default_rng(seed)
    ov = np.empty((trials, d * d))
    for t in range(trials):
        a = random_basis(d, rng).matrix
        b = random_basis(d, rng).matrix
        ov[t] = (np.abs(a.conj().T @ b) ** 2).ravel()
    flat = ov.ravel()
    return {
        "empirical_rate": float(np.mean(np.abs(flat - 1 / d) > eps)),
        "bound": levy_bound(d, eps),
        "mean_overlap": float(flat.mean()),
        "std_error": float(flat.std(ddof=1) / math.sqrt(flat.size)),
    }


def amub_overlap_bound(d: int, p: float) -> float:
    """Upper bound on squared cross overlaps of the approximate-MUB family."""
    return 4 * p / (math.pi * d * d) * (math.log(p) + EULER_GAMMA - math.log(math.pi / 2) + (math.pi - 1) / (2 * p)) + 1 / d


# ---------------------------------------------------------------------------
# quartic row maximisation


def _check_box(d: int, c_min: float, c_max: float) -> None:
    if not 0 <= c_min <= c_max <= 1:
        raise Infeasible(f"need 0 <= c_min <= c_max <= 1, got ({c_min}, {c_max})")
    if c_max * d < 1 - 1e-12 or c_min * d > 1 + 1e-12:
        raise Infeasible("no row with entries in [c_min, c_max] sums to 1")


def prop3_closed_form(d: int, c_min: float, c_max: float) -> float:
    """Maximum of ``sum_{a,a'} x_{aa'}^2`` over ``d`` rows with entries in the box."""
    _check_box(d, c_min, c_max)
    return d * loose_omega(c_max, c_min, d)[1]


def _row_grid(c_min, c_max, d, centre, half, step):
    axes = []
    for i in range(d - 1):
        lo = c_min if centre is None else max(c_min, centre[i] - half)
        hi = c_max if centre is None else min(c_max, centre[i] + half)
        n = max(1, int(math.ceil((hi - lo) / step - 1e-9))) + 1
        axes.append(np.linspace(lo, hi, n))
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
    last = 1 - pts.sum(axis=1)
    ok = (last >= c_min - 1e-12) & (last <= c_max + 1e-12)
    if not np.any(ok):
        return None, -np.inf
    vals = (pts[ok] ** 2).sum(axis=1) + last[ok] ** 2
    i = int(np.argmax(vals))
    return pts[ok][i], float(vals[i])


def prop3_brute_oracle(d: int, c_min: float, c_max: float, grid_step: float = 1e-2) -> float:
    """Grid search for the same maximum (small ``d``); two x10 refinement passes."""
    if d > 4:
        raise ValueError("oracle limited to d <= 4")
    _check_box(d, c_min, c_max)
    best_pt, best = _row_grid(c_min, c_max, d, None, None, grid_step)
    if best_pt is None:
        raise Infeasible("grid found no feasible row")
    step = grid_step
    for _ in range(2):
        pt, val = _row_grid(c_min, c_max, d, best_pt, step, step / 10)
        if val > best:
            best_pt, best = pt, val
        step /= 10
    return d * best


# ---------------------------------------------------------------------------
# scans


def scan_fig1(d: int = 5, ms=(2, 3, 6), ks=None, n: int = 201) -> list[dict]:
    ks = range(1, d) if ks is None else ks
    rows = []
    for eps in np.linspace(0, 1 / d, n):
        c = max(0.0, 1 / d - eps)
        for m in ms:
            t = worst_case_T(d, m, c)
            for k in ks:
                rows.append({"eps_min": float(eps), "m": m, "k": k, "p_threshold": p_threshold_iso(d, k, m, t)})
    return rows


def scan_figA1(d_max: int = 30, m: int = 2, p: float = 0.005) -> list[dict]:
    rows = []
    for d in range(3, d_max + 1):
        rows.append({"d": d, "k": 0, "p": 0.0, "d_eps_min": 1 - d * cmin_tolerance_iso(d, 1, m, 0.0)})
        for k in range(1, d):
            try:
                c = cmin_tolerance_iso(d, k, m, p)
            except InfeasibleNoise:
                continue
            rows.append({"d": d, "k": k, "p": p, "d_eps_min": 1 - d * c})
    return rows


def scan_figA3(d: int = 5, beta: float = 0.5, n: int = 181) -> list[dict]:
    rows = []
    for th in np.linspace(0, math.pi, n):
        for m in (2, 3):
            for k in range(1, d):
                rows.append({"theta": float(th), "m": m, "k": k, "p_threshold": p_threshold_thermal(d, k, m, beta, th)})
    return rows


def scan_figA4(d: int = 5, theta: float = 0.05, beta_max: float = 10.0, n: int = 201) -> list[dict]:
    rows = []
    for b in np.linspace(0, beta_max, n):
        for m in (2, 3):
            for k in range(1, d):
                rows.append({"beta": float(b), "m": m, "k": k, "p_threshold": p_threshold_thermal(d, k, m, b, theta)})
    return rows


def scan_cmin_bound(d_max: int = 100) -> list[dict]:
    return [
        {"d": d, "c_min_bound": cmin_no_witness_bound(d), "eps_min": 1 / d - cmin_no_witness_bound(d)}
        for d in range(2, d_max + 1)
    ]


def scan_levy(ds=(10, 100, 1000, 10**4, 10**5, 10**6), epss=(0.02, 0.05, 0.1)) -> list[dict]:
    return [{"d": d, "eps": e, "levy_bound": levy_bound(d, e)} for d in ds for e in epss]
