"""Comparison witness: fidelity with a target state estimated from the
computational basis plus ``M`` tilted families.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import numtheory as nt
from .bases import tilted_matrix
from .errors import DimensionMismatch, DimensionTooLarge, NonBracketed, NotOddPrime, ZeroDiagonal
from .qcore import DensityMatrix
from .witness import CERT_MARGIN


@dataclass
class BaselineReport:
    lambda_: list  # descending
    F1: float
    F2_tilde: float
    F_tilde: float
    B_tilde_k: list  # k = 1..d
    certified_k_lower: int
    M: int
    order: list  # index permutation used to sort the coefficients

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lambda_")
        return out


def _diag(rho: DensityMatrix) -> np.ndarray:
    return rho.diagonal_probabilities()


def target_coefficients(rho: DensityMatrix, sort: bool = True):
    """``lambda_i = sqrt(<ii|rho|ii> / sum_j <jj|rho|jj>)``.

    With ``sort`` the coefficients come back descending together with the
    permutation applied; otherwise in index order.
    """
    diag = np.clip(np.diag(_diag(rho)), 0, None)
    tot = diag.sum()
    if tot <= 0:
        raise ZeroDiagonal("no weight on matching computational outcomes")
    lam = np.sqrt(diag / tot)
    if not sort:
        return lam
    order = np.argsort(-lam, kind="stable")
    return lam[order], order


def baseline_Bk(lam, k: int) -> float:
    lam = np.sort(np.asarray(lam, dtype=float))[::-1]
    return float(np.sum(lam[:k] ** 2))


def _index_grid(d: int):
    m, mp, n, npr = np.meshgrid(*(np.arange(d),) * 4, indexing="ij")
    mask = (m != mp) & (m != n) & (n != npr) & (npr != mp) & ((m - mp - n + npr) % d == 0)
    q = m * m - mp * mp - n * n + npr * npr
    return m[mask], mp[mask], n[mask], npr[mask], q[mask]


def _dirichlet_ratio(q: np.ndarray, d: int, M: int) -> np.ndarray:
    """``|sin(pi M q/d)| / |sin(pi q/d)|`` with the removable singularity set to ``M``."""
    qr = np.mod(q, d)
    sing = qr == 0
    out = np.full(q.shape, float(M))
    x = qr[~sing] / d
    out[~sing] = np.abs(np.sin(np.pi * np.mod(M * qr[~sing], d) / d)) / np.abs(np.sin(np.pi * x))
    return out


def _geometric_modulus(q: np.ndarray, d: int, M: int) -> np.ndarray:
    """``|sum_{alpha<M} w^(alpha q)|`` by direct summation."""
    alpha = np.arange(M)[:, None]
    return np.abs(np.sum(nt.root_of_unity(alpha * q[None, :], d), axis=0))


def dirichlet_sum_D(d: int, M: int) -> float:
    if d < 2 or not 1 <= M <= d:
        raise DimensionMismatch(f"need d >= 2 and 1 <= M <= d, got d={d}, M={M}")
    *_, q = _index_grid(d)
    return float(_dirichlet_ratio(q, d, M).sum())


def dirichlet_sum_weighted(lam, M: int) -> float:
    """Dirichlet sum weighted by ``sqrt(lam_m lam_n lam_m' lam_n')`` (index order)."""
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    m, mp, n, npr, q = _index_grid(d)
    w = np.sqrt(lam[m] * lam[n] * lam[mp] * lam[npr])
    return float(np.sum(w * _dirichlet_ratio(q, d, M)))


def baseline_fidelity_bound(rho: DensityMatrix, M: int) -> BaselineReport:
    """Fidelity lower bound assembled from the state's matrix elements."""
    d = rho.d
    if d > 12:
        raise DimensionTooLarge(f"d={d} exceeds 12")
    if not 1 <= M <= d:
        raise DimensionMismatch(f"M must lie in [1, {d}]")
    probs = _diag(rho)
    lam = target_coefficients(rho, sort=False)
    first = float(np.sum(lam**2 * np.diag(probs)))

    sigma = 0.0
    for alpha in range(M):
        v = tilted_matrix(lam, alpha)
        kets = np.einsum("ia,ja->ija", v, v.conj()).reshape(d * d, d)
        sigma += np.real(np.einsum("ia,ij,ja->", kets.conj(), rho.matrix, kets))
    sigma /= M

    second = float(lam @ probs @ lam)
    m, mp, n, npr, q = _index_grid(d)
    gamma = np.sqrt(lam[m] * lam[n] * lam[mp] * lam[npr]) / M * _geometric_modulus(q, d, M)
    third = float(np.sum(gamma * np.sqrt(np.clip(probs[mp, npr] * probs[m, n], 0, None))))
    rest = lam.sum() ** 2 / d * sigma - second - third
    total = first + rest

    lam_sorted, order = target_coefficients(rho)
    partial = np.cumsum(lam_sorted**2)
    k_cert = 1
    for k in range(1, d):
        if total > partial[k - 1] + CERT_MARGIN:
            k_cert = k + 1
    return BaselineReport(
        lambda_=[float(x) for x in lam_sorted],
        F1=first,
        F2_tilde=float(rest),
        F_tilde=float(total),
        B_tilde_k=[float(b) for b in partial],
        certified_k_lower=k_cert,
        M=M,
        order=[int(i) for i in order],
    )


# ---------------------------------------------------------------------------
# closed forms for the benchmark families


def baseline_F_iso(d: int, p: float, M: int) -> float:
    return 1 - p + p / d**2 - p * dirichlet_sum_D(d, M) / (M * d**3)


def p_tilde_iso(d: int, k: int, M: int) -> float:
    return d * (d - k) / (d * d - 1 + dirichlet_sum_D(d, M) / (M * d))


def thermal_lambda(d: int, beta: float, p: float) -> np.ndarray:
    w = np.exp(-beta * np.arange(d))
    return np.sqrt(((1 - p) * w / w.sum() + p / d**2) / (1 - p + p / d))


def baseline_F_thermal(d: int, beta: float, p: float, M: int) -> float:
    lam = thermal_lambda(d, beta, p)
    partition = np.exp(-beta * np.arange(d)).sum()
    kappa = np.sum(lam * np.exp(-beta * np.arange(d) / 2)) ** 2 / partition
    return float(p / d**2 * (1 - dirichlet_sum_weighted(lam, M) / M) + (1 - p) * kappa)


def baseline_Bk_thermal(d: int, beta: float, p: float, k: int) -> float:
    if beta < 1e-12:
        return k / d
    num = (1 - p) * (1 - math.exp(-k * beta)) / (1 - math.exp(-d * beta)) + p * k / d**2
    return num / (1 - p + p / d)


def p_tilde_thermal(d: int, k: int, beta: float, M: int, tol: float = 1e-9) -> float:
    """Supremum of ``p`` with ``F_tilde > B_tilde_k`` for the noisy thermal family."""
    if d < 3 or not nt.is_prime(d):
        raise NotOddPrime(f"d={d} is not an odd prime")

    def g(p):
        return baseline_F_thermal(d, beta, p, M) - baseline_Bk_thermal(d, beta, p, k)

    ps = np.linspace(0, 1, 64)
    vals = np.array([g(p) for p in ps])
    if vals[0] <= 0:
        return 0.0
    neg = np.nonzero(vals <= 0)[0]
    if neg.size == 0:
        raise NonBracketed("no sign change of F_tilde - B_tilde_k on [0, 1]")
    lo, hi = ps[neg[0] - 1], ps[neg[0]]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))
