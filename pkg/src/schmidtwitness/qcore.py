"""Linear-algebra primitives shared by the rest of the package.

Conventions
-----------
* A basis is stored as a ``d x d`` complex matrix whose *columns* are the basis
  vectors, so ``basis.matrix[:, a]`` is the vector with outcome label ``a``.
* Bipartite vectors use the ordering ``|i>|j> -> i*d + j`` (party A first).
* Complex conjugation is always taken in the computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyCounts,
    InvalidDensityMatrix,
    NotOrthonormal,
    NotUnitary,
    SchemaViolation,
)

# construction-side tolerance (generated families must meet this)
ORTHO_TOL = 1e-10
# acceptance tolerance for user supplied bases and frames
INPUT_TOL = 1e-8
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def is_unitary(u: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_unitary(u, dim: int, tol: float = INPUT_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise DimensionMismatch(f"frame must be {dim}x{dim}, got {u.shape}")
    if not is_unitary(u, tol):
        raise NotUnitary("frame matrix is not unitary")
    return u


@dataclass(frozen=True)
class Basis:
    """An orthonormal basis of C^d; columns of ``matrix`` are the vectors."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"basis matrix must be square, got {m.shape}")
        if m.shape[0] < 2:
            raise DimensionMismatch("dimension must be at least 2")
        if not is_unitary(m, INPUT_TOL):
            raise NotOrthonormal(f"basis {self.label!r} is not orthonormal")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, a] for a in range(self.dim)]

    def gram(self) -> np.ndarray:
        return self.matrix.conj().T @ self.matrix


@dataclass(frozen=True)
class BasisSet:
    """``m >= 2`` bases of a common dimension plus the relative frame ``U``.

    Party B's vector for outcome ``a`` of basis ``z`` is ``U @ conj(e^z_a)``.
    """

    bases: tuple[Basis, ...]
    frame: np.ndarray | None = None

    def __post_init__(self):
        bases = tuple(self.bases)
        if len(bases) < 1:
            raise DimensionMismatch("a basis set needs at least one basis")
        dims = {b.dim for b in bases}
        if len(dims) != 1:
            raise DimensionMismatch(f"bases have mixed dimensions {sorted(dims)}")
        d = dims.pop()
        u = np.eye(d, dtype=complex) if self.frame is None else _check_unitary(self.frame, d)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "frame", _frozen(u))

    @property
    def dim(self) -> int:
        return self.bases[0].dim

    @property
    def m(self) -> int:
        return len(self.bases)

    @property
    def labels(self) -> list[str]:
        return [b.label for b in self.bases]

    def subset(self, indices: Iterable[int]) -> "BasisSet":
        return BasisSet(tuple(self.bases[i] for i in indices), self.frame)

    def with_frame(self, frame: np.ndarray) -> "BasisSet":
        return BasisSet(self.bases, frame)

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True)
class OverlapTable:
    """All squared overlaps ``|<e^z_a|e^z'_a'>|^2`` of a basis set.

    ``overlaps[z, z2, a, a2]`` holds the squared overlap; ``c_max``/``c_min``
    are ``m x m`` arrays of per-pair extrema (diagonal entries are the trivial
    self-overlap extrema 1 and 0 and are never used by the bounds).
    """

    dim: int
    m: int
    overlaps: np.ndarray
    c_max: np.ndarray
    c_min: np.ndarray

    @property
    def pair_summary(self) -> dict[tuple[int, int], tuple[float, float]]:
        return {
            (z, w): (float(self.c_max[z, w]), float(self.c_min[z, w]))
            for z in range(self.m)
            for w in range(self.m)
            if z != w
        }

    def fourth_power_sums(self) -> np.ndarray:
        """``sum_{a,a'} |<e^z_a|e^z'_a'>|^4`` for every ordered pair."""
        return np.sum(self.overlaps**2, axis=(2, 3))


@dataclass(frozen=True)
class DensityMatrix:
    """Two-qudit state with equal local dimension ``d``."""

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        n = self.d * self.d
        if rho.shape != (n, n):
            raise DimensionMismatch(f"expected {n}x{n} matrix for d={self.d}, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidDensityMatrix("matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > HERMITIAN_TOL:
            raise InvalidDensityMatrix(f"trace is {np.trace(rho).real:.12g}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise InvalidDensityMatrix("matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(rho))

    @classmethod
    def from_ket(cls, psi: np.ndarray, d: int) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(d, np.outer(psi, psi.conj()))

    def diagonal_probabilities(self) -> np.ndarray:
        """``<ij|rho|ij>`` as a ``d x d`` real array."""
        return np.real(np.diag(self.matrix)).reshape(self.d, self.d)


@dataclass(frozen=True)
class MeasuredCounts:
    """Joint outcome counts ``n_z(a, b)`` for coordinated basis pairs."""

    dim: int
    labels: tuple[str, ...]
    counts: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        tables = tuple(np.asarray(c) for c in self.counts)
        if len(labels) != len(tables):
            raise SchemaViolation("one count table per basis label is required")
        for lab, t in zip(labels, tables):
            if t.shape != (self.dim, self.dim):
                raise SchemaViolation(f"counts for {lab!r} must be {self.dim}x{self.dim}, got {t.shape}")
            if not np.issubdtype(t.dtype, np.integer):
                if not np.all(np.equal(np.mod(t, 1), 0)):
                    raise SchemaViolation(f"counts for {lab!r} are not integers")
                t = t.astype(np.int64)
            if np.any(t < 0):
                from .errors import NegativeCount

                raise NegativeCount(f"negative count in table {lab!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "counts", tuple(np.asarray(t, dtype=np.int64) for t in tables))

    def table(self, label: str) -> np.ndarray:
        try:
            return self.counts[self.labels.index(label)]
        except ValueError:
            raise SchemaViolation(f"no counts recorded for basis {label!r}") from None

    def totals(self) -> np.ndarray:
        tot = np.array([int(t.sum()) for t in self.counts])
        if np.any(tot <= 0):
            raise EmptyCounts("every basis needs at least one recorded event")
        return tot


# ---------------------------------------------------------------------------
# operations


def make_basis(vectors: Sequence[Sequence[complex]], label: str = "") -> Basis:
    """Validate user supplied vectors (rows of ``vectors``) as a basis.

    Vectors within 1e-8 of unit norm are rescaled to unit norm; anything that
    is not orthonormal to 1e-8 is rejected rather than re-orthonormalised,
    since the bounds assume exact orthonormality.
    """
    vecs = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if not vecs:
        raise DimensionMismatch("no vectors given")
    d = len(vecs[0])
    if d < 2 or any(len(v) != d for v in vecs) or len(vecs) != d:
        raise DimensionMismatch(f"need {d} vectors of length {d} (d >= 2)")
    norms = np.array([np.linalg.norm(v) for v in vecs])
    if np.any(np.abs(norms - 1) > INPUT_TOL):
        raise NotOrthonormal("vector norms deviate from 1 by more than 1e-8")
    mat = np.column_stack([v / n for v, n in zip(vecs, norms)])
    if not is_unitary(mat, INPUT_TOL):
        raise NotOrthonormal("vectors are not pairwise orthogonal")
    return Basis(mat, label)


def overlap_table(bs: BasisSet) -> OverlapTable:
    mats = np.stack([b.matrix for b in bs.bases])  # (m, d, d)
    # amp[z, w, a, b] = <e^z_a | e^w_b>
    amp = np.einsum("zja,wjb->zwab", mats.conj(), mats)
    ov = np.abs(amp) ** 2
    ov.setflags(write=False)
    c_max = ov.max(axis=(2, 3))
    c_min = ov.min(axis=(2, 3))
    return OverlapTable(bs.dim, bs.m, ov, c_max, c_min)


def frame_conjugate(b: Basis, u: np.ndarray | None = None) -> Basis:
    """Party B's basis ``{U |e_a*>}``."""
    if u is None:
        u = np.eye(b.dim)
    u = _check_unitary(u, b.dim)
    return Basis(u @ b.matrix.conj(), f"{b.label}*")


def max_entangled(d: int, u: np.ndarray | None = None) -> np.ndarray:
    """``(1 x U)|Phi+_d>`` as a length ``d*d`` vector."""
    if d < 2:
        raise DimensionMismatch("d must be at least 2")
    phi = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
    if u is None:
        return phi
    u = _check_unitary(u, d)
    return np.kron(np.eye(d), u) @ phi


def bell_symmetry_check(a: np.ndarray, d: int) -> float:
    """Max-abs difference between ``(A x 1)|Phi+>`` and ``(1 x A^T)|Phi+>``."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (d, d):
        raise DimensionMismatch(f"A must be {d}x{d}")
    phi = max_entangled(d)
    eye = np.eye(d)
    lhs = np.kron(a, eye) @ phi
    rhs = np.kron(eye, a.T) @ phi
    return float(np.max(np.abs(lhs - rhs)))


def rank_one_sum_eig_bound_check(psi: np.ndarray, phi: np.ndarray, tol: float = 1e-10) -> bool:
    """Whether the spectrum of ``|psi><phi| + |phi><psi|`` lies in ``+-(|<psi|phi>| + 1)``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    phi = np.asarray(phi, dtype=complex).ravel()
    if psi.shape != phi.shape:
        raise DimensionMismatch("kets must have equal dimension")
    op = np.outer(psi, phi.conj())
    op = op + op.conj().T
    ev = np.linalg.eigvalsh(op)
    bound = abs(np.vdot(psi, phi)) + 1
    return bool(ev[-1] <= bound + tol and ev[0] >= -bound - tol)


def _as_matrix(rho) -> tuple[np.ndarray, int]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.d
    rho = np.asarray(rho, dtype=complex)
    d = int(round(np.sqrt(rho.shape[0])))
    if d * d != rho.shape[0]:
        raise DimensionMismatch("matrix size is not a square of the local dimension")
    return rho, d


def reduced_state(rho, party: str = "A") -> np.ndarray:
    mat, d = _as_matrix(rho)
    t = mat.reshape(d, d, d, d)
    if party.upper() == "A":
        return np.einsum("ijkj->ik", t)
    if party.upper() == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")


def partial_transpose(rho) -> np.ndarray:
    """Partial transpose on party B."""
    mat, d = _as_matrix(rho)
    return mat.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)


def negativity(rho) -> float:
    ev = np.linalg.eigvalsh(partial_transpose(rho))
    return float(-np.sum(ev[ev < 0]))


# ---------------------------------------------------------------------------
# JSON wire format: complex numbers as [re, im] pairs


def complex_to_json(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [complex_to_json(row) for row in a]


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise SchemaViolation("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def basis_to_dict(b: Basis) -> dict:
    return {"dim": b.dim, "label": b.label, "vectors": complex_to_json(b.matrix.T)}


def basis_from_dict(data: dict) -> Basis:
    try:
        vecs = complex_from_json(data["vectors"])
        b = make_basis(vecs, str(data.get("label", "")))
    except KeyError as exc:
        raise SchemaViolation(f"basis entry missing key {exc}") from None
    if "dim" in data and int(data["dim"]) != b.dim:
        raise SchemaViolation(f"declared dim {data['dim']} does not match vectors")
    return b


def basis_set_to_dict(bs: BasisSet) -> dict:
    return {
        "dim": bs.dim,
        "bases": [basis_to_dict(b) for b in bs.bases],
        "frame": complex_to_json(bs.frame),
    }


def basis_set_from_dict(data: dict) -> BasisSet:
    if "bases" not in data:
        # a single basis in the plain Basis schema
        return BasisSet((basis_from_dict(data),))
    bases = tuple(basis_from_dict(b) for b in data["bases"])
    frame = data.get("frame")
    bs = BasisSet(bases, None if frame is None else complex_from_json(frame))
    if "dim" in data and int(data["dim"]) != bs.dim:
        raise SchemaViolation(f"declared dim {data['dim']} does not match bases")
    return bs


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"d": rho.d, "matrix": complex_to_json(rho.matrix)}


def density_from_dict(data: dict) -> DensityMatrix:
    try:
        return DensityMatrix(int(data["d"]), complex_from_json(data["matrix"]))
    except KeyError as exc:
        raise SchemaViolation(f"state missing key {exc}") from None
