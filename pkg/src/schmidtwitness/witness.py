"""Witness value, violation bounds, fidelity bounds and certification.

Pair sums run over *ordered* pairs ``z != z'``.  ``G`` is symmetric, so each
unordered pair contributes twice; halving it is a factor-2 bug.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    EmptyCounts,
    InvalidOverlapSummary,
    NumericalInconsistency,
    SchemaViolation,
    TooManyBases,
)
from .qcore import BasisSet, DensityMatrix, MeasuredCounts, OverlapTable, max_entangled, overlap_table

IMAG_TOL = 1e-10
# a subset certifies Schmidt number k+1 only if S exceeds B_k by this margin
CERT_MARGIN = 1e-9
MAX_SUBSET_BASES = 12


# ---------------------------------------------------------------------------
# witness value


def _pair_kets(bs: BasisSet, z: int) -> np.ndarray:
    """Columns ``|e^z_a> (x) U|e^z_a*>`` for ``a = 0..d-1`` (shape ``d^2 x d``)."""
    e = bs.bases[z].matrix
    f = bs.frame @ e.conj()
    d = bs.dim
    return np.einsum("ia,ja->ija", e, f).reshape(d * d, d)


def _check_dims(rho: DensityMatrix, bs: BasisSet) -> None:
    if rho.d != bs.dim:
        raise DimensionMismatch(f"state has d={rho.d}, bases have d={bs.dim}")


def matching_probabilities(rho: DensityMatrix, bs: BasisSet) -> np.ndarray:
    """Per-basis probability of equal outcomes, ``sum_a <e_a e~_a*|rho|e_a e~_a*>``."""
    _check_dims(rho, bs)
    out = np.empty(bs.m)
    for z in range(bs.m):
        k = _pair_kets(bs, z)
        val = np.einsum("ia,ij,ja->", k.conj(), rho.matrix, k)
        if abs(val.imag) > IMAG_TOL:
            raise NumericalInconsistency(f"imaginary residue {val.imag:.3g} in basis {z}")
        out[z] = val.real
    return out


def witness_value(rho: DensityMatrix, bs: BasisSet) -> float:
    return float(np.sum(matching_probabilities(rho, bs)))


def joint_probabilities(rho: DensityMatrix, bs: BasisSet, z: int) -> np.ndarray:
    """``P(a, b)`` for outcome ``a`` on A (basis z) and ``b`` on B (frame-conjugated basis z)."""
    _check_dims(rho, bs)
    e = bs.bases[z].matrix
    f = bs.frame @ e.conj()
    d = bs.dim
    t = rho.matrix.reshape(d, d, d, d)
    p = np.einsum("ia,jb,ijkl,ka,lb->ab", e.conj(), f.conj(), t, e, f).real
    return np.clip(p, 0.0, None)


def _per_basis_empirical(counts: MeasuredCounts) -> tuple[np.ndarray, np.ndarray]:
    tot = counts.totals()
    q = np.array([np.trace(t) for t in counts.counts]) / tot
    return q, q * (1 - q) / tot


def witness_value_empirical(counts: MeasuredCounts) -> tuple[float, float]:
    """Estimate of the witness value and its standard error from outcome counts."""
    q, var = _per_basis_empirical(counts)
    return float(q.sum()), float(math.sqrt(var.sum()))


def sample_counts(rho: DensityMatrix, bs: BasisSet, shots: int, seed=None) -> MeasuredCounts:
    """Multinomial outcome counts drawn from the exact joint distributions."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    d = bs.dim
    tables = []
    for z in range(bs.m):
        p = joint_probabilities(rho, bs, z).ravel()
        tables.append(rng.multinomial(shots, p / p.sum()).reshape(d, d))
    labels = tuple(lab or f"basis-{z}" for z, lab in enumerate(bs.labels))
    return MeasuredCounts(d, labels, tuple(tables))


# ---------------------------------------------------------------------------
# bounds


def _lambda(d: int, gsum: float) -> float:
    # tiny negative sums are rounding noise (G >= 0 analytically)
    return 0.5 * (1 + math.sqrt(1 + 2 * d * max(gsum, 0.0)))


def _bound_vector(d: int, m: int, t: float) -> np.ndarray:
    k = np.arange(1, d + 1)
    return k * (m - t) / d + t


@dataclass(frozen=True)
class TightBoundReport:
    d: int
    m: int
    G: dict
    lambda_C: float
    T_C: float
    B: np.ndarray  # B[k-1] = B_k, k = 1..d

    def B_k(self, k: int) -> float:
        return self.T_C if k == 0 else float(self.B[k - 1])


@dataclass(frozen=True)
class LooseBoundReport:
    d: int
    m: int
    L: dict
    Omega: dict
    Gbar: dict
    lambda_bar: float
    T_bar: float
    Bbar: np.ndarray

    @property
    def T_C(self) -> float:
        return self.T_bar

    @property
    def B(self) -> np.ndarray:
        return self.Bbar

    def B_k(self, k: int) -> float:
        return self.T_bar if k == 0 else float(self.Bbar[k - 1])


def tight_bounds(table: OverlapTable) -> TightBoundReport:
    d, m = table.dim, table.m
    if m < 2:
        raise DimensionMismatch("bounds need at least two bases")
    fourth = table.fourth_power_sums()
    gvals = {}
    for z, w in itertools.permutations(range(m), 2):
        gvals[(z, w)] = float(1 - (d + 1) * table.c_min[z, w] + fourth[z, w] / d)
    lam = _lambda(d, sum(gvals.values()))
    t = min(lam, m)
    return TightBoundReport(d, m, gvals, lam, t, _bound_vector(d, m, t))


def loose_L(c_max: float, c_min: float, d: int) -> int:
    if c_max - c_min < 1e-12:
        return d
    # nudge absorbs representation error at exact-integer quotients
    return min(d, int(math.floor((1 - c_min * d + 1e-12) / (c_max - c_min))))


def loose_omega(c_max: float, c_min: float, d: int) -> tuple[int, float]:
    n_hi = loose_L(c_max, c_min, d)
    rest = 1 - n_hi * c_max - (d - n_hi - 1) * c_min
    return n_hi, n_hi * c_max**2 + (d - n_hi - 1) * c_min**2 + rest**2


def _validate_pair(c_max: float, c_min: float, d: int) -> None:
    if c_max < c_min:
        raise InvalidOverlapSummary(f"c_max={c_max} < c_min={c_min}")
    if c_min < 0 or c_max > 1 + 1e-12:
        raise InvalidOverlapSummary("overlaps must lie in [0, 1]")
    if c_min > 1 / d + 1e-12:
        raise InvalidOverlapSummary(f"c_min={c_min} exceeds 1/d")
    if c_max < 1 / d - 1e-12:
        raise InvalidOverlapSummary(f"c_max={c_max} below 1/d makes row sums infeasible")


def loose_bounds(pair_summary, d: int | None = None, m: int | None = None) -> LooseBoundReport:
    """Loosened bounds from per-ordered-pair ``(c_max, c_min)`` only.

    ``pair_summary`` is a mapping ``(z, z') -> (c_max, c_min)`` or an
    :class:`OverlapTable`.  When only unordered pairs are supplied the missing
    orientation is filled in by symmetry.
    """
    if isinstance(pair_summary, OverlapTable):
        d, m = pair_summary.dim, pair_summary.m
        pair_summary = pair_summary.pair_summary
    if d is None or m is None:
        raise DimensionMismatch("d and m are required with a plain pair summary")
    if m < 2:
        raise DimensionMismatch("bounds need at least two bases")
    summ = dict(pair_summary)
    for (z, w), v in list(summ.items()):
        summ.setdefault((w, z), v)
    counts, omegas, gbars = {}, {}, {}
    for z, w in itertools.permutations(range(m), 2):
        if (z, w) not in summ:
            raise InvalidOverlapSummary(f"missing pair ({z}, {w})")
        c_max, c_min = map(float, summ[(z, w)])
        _validate_pair(c_max, c_min, d)
        counts[(z, w)], omegas[(z, w)] = loose_omega(c_max, c_min, d)
        gbars[(z, w)] = 1 - (d + 1) * c_min + omegas[(z, w)]
    lam = _lambda(d, sum(gbars.values()))
    t = min(lam, m)
    return LooseBoundReport(d, m, counts, omegas, gbars, lam, t, _bound_vector(d, m, t))


def fidelity_lower(S: float, m: int, T: float) -> float:
    if m - T <= 0:
        return 0.0
    return float(min(1.0, max(0.0, (S - T) / (m - T))))


def certified_k(value: float, bounds: np.ndarray, t_c: float) -> tuple[int, float]:
    """Largest certified Schmidt number and the margin over the last bound beaten.

    ``bounds[k-1]`` is the bound for Schmidt number ``k``; the margin of an
    uncertified value is taken against ``t_c``.
    """
    k_cert = 1
    for k in range(1, len(bounds)):
        if value > bounds[k - 1] + CERT_MARGIN:
            k_cert = k + 1
    ref = t_c if k_cert == 1 else bounds[k_cert - 2]
    return k_cert, float(value - ref)


# ---------------------------------------------------------------------------
# certification


@dataclass
class WitnessReport:
    S_value: float
    bound_mode: str
    bounds: list
    certified_k_lower: int
    fidelity_lower: float
    subset: list
    T_C: float = float("nan")
    S_error: float | None = None
    d: int | None = None
    m: int | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bounds"] = [float(b) for b in self.bounds]
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "WitnessReport":
        try:
            return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})
        except TypeError as exc:
            raise SchemaViolation(str(exc)) from None


def bounds_for(bs: BasisSet, mode: str = "tight"):
    table = overlap_table(bs)
    if mode == "tight":
        return tight_bounds(table)
    if mode == "loose":
        return loose_bounds(table)
    raise ValueError(f"mode must be 'tight' or 'loose', got {mode!r}")


def _align_counts(counts: MeasuredCounts, bs: BasisSet) -> list[int]:
    """Index into ``counts`` for every basis of ``bs``."""
    if counts.dim != bs.dim:
        raise DimensionMismatch(f"counts have d={counts.dim}, bases have d={bs.dim}")
    labels = list(counts.labels)
    if all(lab in labels for lab in bs.labels) and len(set(bs.labels)) == bs.m:
        return [labels.index(lab) for lab in bs.labels]
    if len(labels) == bs.m:
        return list(range(bs.m))
    raise SchemaViolation("count labels do not match the basis labels")


def certify(data, bs: BasisSet, mode: str = "tight") -> WitnessReport:
    """Best certificate over all subsets of at least two bases.

    ``data`` is a :class:`DensityMatrix` or :class:`MeasuredCounts`.  The chosen
    subset maximises the certified Schmidt number, then the margin over the
    bound it beat, then prefers fewer bases, then lexicographic order.  The
    reported fidelity bound is the best over all subsets.
    """
    if bs.m > MAX_SUBSET_BASES:
        raise TooManyBases(f"{bs.m} bases exceed the subset-search cap of {MAX_SUBSET_BASES}")
    if bs.m < 2:
        raise DimensionMismatch("certification needs at least two bases")
    if mode not in ("tight", "loose"):
        raise ValueError(f"mode must be 'tight' or 'loose', got {mode!r}")

    var = None
    if isinstance(data, MeasuredCounts):
        idx = _align_counts(data, bs)
        q, v = _per_basis_empirical(data)
        probs, var = q[idx], v[idx]
    elif isinstance(data, DensityMatrix):
        probs = matching_probabilities(data, bs)
    else:
        raise TypeError("data must be a DensityMatrix or MeasuredCounts")

    table = overlap_table(bs)
    best, best_key, best_fid = None, None, 0.0
    for size in range(2, bs.m + 1):
        for sub in itertools.combinations(range(bs.m), size):
            sl = list(sub)
            st = OverlapTable(
                table.dim,
                size,
                table.overlaps[np.ix_(sl, sl)],
                table.c_max[np.ix_(sl, sl)],
                table.c_min[np.ix_(sl, sl)],
            )
            rep = tight_bounds(st) if mode == "tight" else loose_bounds(st)
            s_val = float(probs[sl].sum())
            k_cert, margin = certified_k(s_val, rep.B, rep.T_C)
            fid = fidelity_lower(s_val, size, rep.T_C)
            best_fid = max(best_fid, fid)
            key = (k_cert, margin, -size)
            if best_key is None or key > best_key:
                err = None if var is None else float(math.sqrt(var[sl].sum()))
                best_key = key
                best = WitnessReport(
                    S_value=s_val,
                    bound_mode=mode,
                    bounds=[float(b) for b in rep.B],
                    certified_k_lower=k_cert,
                    fidelity_lower=fid,
                    subset=sl,
                    T_C=float(rep.T_C),
                    S_error=err,
                    d=bs.dim,
                    m=size,
                )
    best.fidelity_lower = best_fid
    return best


# ---------------------------------------------------------------------------
# operator level


def witness_operator(bs: BasisSet) -> np.ndarray:
    d = bs.dim
    if d > 12:
        raise DimensionTooLarge(f"d={d} exceeds 12")
    w = np.zeros((d * d, d * d), dtype=complex)
    for z in range(bs.m):
        k = _pair_kets(bs, z)
        w += k @ k.conj().T
    return w


def operator_inequality_check(bs: BasisSet) -> float:
    """Largest eigenvalue of ``W - (m - T)|phi><phi| - T`` (non-positive when the bound holds)."""
    d = bs.dim
    if d > 8:
        raise DimensionTooLarge(f"d={d} exceeds 8")
    t = tight_bounds(overlap_table(bs)).T_C
    phi = max_entangled(d, bs.frame)
    op = witness_operator(bs) - (bs.m - t) * np.outer(phi, phi.conj()) - t * np.eye(d * d)
    return float(np.linalg.eigvalsh(op)[-1])
