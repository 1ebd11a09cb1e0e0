"""Benchmark state families with closed-form reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatch
from .qcore import DensityMatrix, max_entangled

BETA_ZERO = 1e-12


@dataclass(frozen=True)
class IsotropicParams:
    d: int
    p: float

    def __post_init__(self):
        _check(self.d, self.p)


@dataclass(frozen=True)
class ThermalParams:
    d: int
    beta: float
    p: float

    def __post_init__(self):
        _check(self.d, self.p)
        if self.beta < 0:
            raise ValueError("beta must be non-negative")


def _check(d: int, p: float) -> None:
    if d < 2:
        raise DimensionMismatch(f"d must be >= 2, got {d}")
    if not 0 <= p <= 1:
        raise ValueError(f"noise ratio must lie in [0, 1], got {p}")


def _noisy(psi: np.ndarray, d: int, p: float) -> DensityMatrix:
    rho = (1 - p) * np.outer(psi, psi.conj()) + p / d**2 * np.eye(d * d)
    return DensityMatrix(d, rho)


def isotropic(d: int, p: float) -> DensityMatrix:
    _check(d, p)
    return _noisy(max_entangled(d), d, p)


def thermal_ket(d: int, beta: float) -> np.ndarray:
    w = np.exp(-beta * np.arange(d) / 2)
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = w
    return psi / np.linalg.norm(psi)


def purified_thermal(d: int, beta: float, p: float) -> DensityMatrix:
    ThermalParams(d, beta, p)
    return _noisy(thermal_ket(d, beta), d, p)


def iso_threshold(d: int, k: int) -> float:
    """Noise level below which the isotropic state has Schmidt number above ``k``."""
    return d * (d - k) / (d * d - 1)


def schmidt_number_isotropic(d: int, p: float) -> int:
    _check(d, p)
    # Schmidt number k+1 on [iso_threshold(k+1), iso_threshold(k))
    for k in range(d - 1, 0, -1):
        if p < iso_threshold(d, k):
            return k + 1
    return 1


def witness_closed_isotropic(d: int, p: float, m: int) -> float:
    return p * m / d + (1 - p) * m


def ent_fidelity_isotropic(d: int, p: float) -> float:
    return 1 - p + p / d**2


def _tanh_ratio(d: int, beta: float) -> float:
    if beta < BETA_ZERO:
        return 1.0
    return math.tanh(d * beta / 4) / (d * math.tanh(beta / 4))


def tau_thermal(d: int, beta: float, m: int) -> float:
    if beta < BETA_ZERO:
        return float(m)
    return 1 + (m - 1) * _tanh_ratio(d, beta)


def witness_closed_thermal(d: int, beta: float, p: float, m: int) -> float:
    """Witness value of the noisy purified thermal state for the drifted basis triple."""
    return (1 - p) * tau_thermal(d, beta, m) + m * p / d


def ent_fidelity_thermal(d: int, beta: float, p: float) -> float:
    if beta < BETA_ZERO:
        return ent_fidelity_isotropic(d, p)
    return (1 - p) * _tanh_ratio(d, beta) + p / d**2


def fidelity_diagonal_phase_search(rho: DensityMatrix, restarts: int = 4, seed=0) -> float:
    """Max of ``<Phi+|(V x 1) rho (V x 1)^dag|Phi+>`` over diagonal-phase ``V``.

    Numerical cross-check only; adequate for states whose Schmidt vectors are
    computational.
    """
    d = rho.d
    phi = max_entangled(d)
    eye = np.eye(d)
    rng = np.random.default_rng(seed)

    def neg_fid(th):
        v = np.diag(np.exp(1j * np.concatenate([[0.0], th])))
        psi = np.kron(v, eye).conj().T @ phi
        return -np.real(psi.conj() @ rho.matrix @ psi)

    best = -neg_fid(np.zeros(d - 1))
    for _ in range(restarts):
        res = minimize(neg_fid, rng.uniform(0, 2 * np.pi, d - 1), method="BFGS")
        best = max(best, -res.fun)
    return float(best)
