"""Constructors for the measurement-basis families.

Every constructor returns vectors as *columns*; ``vector a`` has amplitude
``matrix[j, a]`` on computational state ``|j>``.  Phase functions ``f`` are
given in turns (multiplied by 2*pi inside exponents) and default to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numtheory as nt
from .errors import (
    BadSchmidtVector,
    DimensionMismatch,
    IndexOutOfRange,
    NotOddPrime,
)
from .qcore import Basis, BasisSet


def _phase_vector(d: int, f) -> np.ndarray:
    if f is None:
        return np.ones(d, dtype=complex)
    f = np.asarray(f, dtype=float)
    if f.shape != (d,):
        raise DimensionMismatch(f"phase function must have length {d}")
    if not np.all(np.isfinite(f)):
        raise ValueError("phase function has non-finite entries")
    return np.exp(2j * np.pi * f)


def _check_dim(d: int) -> None:
    if d < 2:
        raise DimensionMismatch(f"dimension must be >= 2, got {d}")


def computational(d: int) -> Basis:
    _check_dim(d)
    return Basis(np.eye(d, dtype=complex), "computational")


def fourier(d: int, f=None) -> Basis:
    _check_dim(d)
    j = np.arange(d)
    mat = nt.root_of_unity(np.outer(j, j), d) / np.sqrt(d)
    return Basis(_phase_vector(d, f)[:, None] * mat, "fourier")


def quadratic_mub(d: int, p_r: int = 1, f=None) -> Basis:
    """Third basis, amplitudes ``exp(2 pi i[(d - p_r) j^2/(2d) + a j/d + f(j)])/sqrt(d)``."""
    _check_dim(d)
    nt.check_modulus_parameter(d, p_r)
    j = np.arange(d)[:, None]
    a = np.arange(d)[None, :]
    mat = nt.root_of_unity((d - p_r) * j * j + 2 * a * j, 2 * d) / np.sqrt(d)
    return Basis(_phase_vector(d, f)[:, None] * mat, f"quadratic-pr{p_r}")


def three_mubs(d: int, p_r: int = 1, f=None) -> BasisSet:
    """Computational, Fourier and quadratic bases; mutually unbiased for any ``d``."""
    return BasisSet((computational(d), fourier(d, f), quadratic_mub(d, p_r, f)))


def ivonovic_quadratic(d: int) -> Basis:
    """Amplitudes ``w^(j k + k^2)/sqrt(d)`` (odd prime ``d``)."""
    if d < 3 or not nt.is_prime(d):
        raise NotOddPrime(f"d={d} is not an odd prime")
    k = np.arange(d)[:, None]
    j = np.arange(d)[None, :]
    return Basis(nt.root_of_unity(j * k + k * k, d) / np.sqrt(d), "ivonovic")


def phase_drift(b: Basis, alpha: int, theta: float) -> Basis:
    """Apply ``exp(i theta)`` to computational component ``alpha`` of every vector."""
    if not 0 <= alpha < b.dim:
        raise IndexOutOfRange(f"alpha={alpha} outside [0, {b.dim})")
    mat = np.array(b.matrix)
    mat[alpha, :] *= np.exp(1j * theta)
    return Basis(mat, f"{b.label}-drift")


def drifted_triple(d: int, theta: float, alpha: int = 0) -> BasisSet:
    """Computational, Fourier and the phase-drifted quadratic basis (odd prime ``d``)."""
    return BasisSet((computational(d), fourier(d), phase_drift(ivonovic_quadratic(d), alpha, theta)))


def prime_mubs(d: int) -> BasisSet:
    """A complete set of ``d + 1`` MUBs for prime ``d``."""
    if d == 2:
        return three_mubs(2, 1)
    if d < 2 or not nt.is_prime(d):
        raise NotOddPrime(f"d={d} is not prime")
    lam = np.full(d, 1 / np.sqrt(d))
    fams = tilted_bases(lam, d)
    return BasisSet((computational(d),) + tuple(Basis(t.matrix, f"mub-{t.alpha}") for t in fams))


def amub_set(d: int, p_eff: float | None = None) -> BasisSet:
    """Standard basis plus ``d`` bases ``exp[2 pi i (z j^2/p + a j/d)]/sqrt(d)``.

    ``j`` runs over ``1..d`` (stored in rows ``0..d-1``) and ``z`` over ``1..d``.
    ``p_eff`` defaults to the smallest prime ``>= d``; non-integer values are
    accepted and evaluated in floating point.
    """
    _check_dim(d)
    if p_eff is None:
        p_eff = nt.smallest_prime_geq(d)
    if not p_eff > 0:
        raise ValueError("p_eff must be positive")
    j = np.arange(1, d + 1)[:, None]
    a = np.arange(d)[None, :]
    bases = [computational(d)]
    exact = float(p_eff).is_integer()
    for z in range(1, d + 1):
        if exact:
            p = int(p_eff)
            mat = nt.root_of_unity(z * j * j * d + a * j * p, p * d)
        else:
            mat = np.exp(2j * np.pi * (np.mod(z * j * j / p_eff, 1.0) + np.mod(a * j, d) / d))
        bases.append(Basis(mat / np.sqrt(d), f"amub-{z}"))
    return BasisSet(tuple(bases))


@dataclass(frozen=True)
class TiltedFamily:
    """Unit vectors ``|j~_alpha>`` as columns; ``orthogonal`` is False for non-uniform weights."""

    alpha: int
    matrix: np.ndarray
    orthogonal: bool


def tilted_matrix(lam, alpha: int) -> np.ndarray:
    """Columns ``sum_n w^(j n + alpha n^2) sqrt(lam_n)|n> / sqrt(sum lam)``; no ordering checks."""
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    n = np.arange(d)[:, None]
    j = np.arange(d)[None, :]
    ph = nt.root_of_unity(j * n + alpha * n * n, d)
    return ph * np.sqrt(lam)[:, None] / np.sqrt(lam.sum())


def tilted_bases(lam: Sequence[float], M: int) -> list[TiltedFamily]:
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    if d < 2:
        raise BadSchmidtVector("need at least two Schmidt coefficients")
    if np.any(lam < 0):
        raise BadSchmidtVector("Schmidt coefficients must be non-negative")
    if np.any(np.diff(lam) > 1e-12):
        raise BadSchmidtVector("Schmidt coefficients must be sorted in descending order")
    if abs(np.sum(lam**2) - 1) > 1e-9:
        raise BadSchmidtVector("squared Schmidt coefficients must sum to 1")
    if not 1 <= M <= d:
        raise BadSchmidtVector(f"M must lie in [1, {d}], got {M}")
    ortho = bool(lam.max() - lam.min() <= 1e-12)
    out = []
    for alpha in range(M):
        mat = tilted_matrix(lam, alpha)
        mat.setflags(write=False)
        out.append(TiltedFamily(alpha, mat, ortho))
    return out


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix, pivots made real positive."""
    rng = _rng(seed)
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def random_basis(d: int, seed=None) -> Basis:
    _check_dim(d)
    return Basis(random_unitary(d, seed), "random")
