import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schmidtwitness import analysis, bases, qcore, states
from schmidtwitness.errors import (
    DimensionMismatch,
    DimensionTooLarge,
    EmptyCounts,
    InvalidOverlapSummary,
    TooManyBases,
)
from schmidtwitness.qcore import BasisSet, DensityMatrix, MeasuredCounts, overlap_table
from schmidtwitness.witness import (
    WitnessReport,
    certified_k,
    certify,
    fidelity_lower,
    loose_bounds,
    loose_L,
    loose_omega,
    matching_probabilities,
    operator_inequality_check,
    sample_counts,
    tight_bounds,
    witness_operator,
    witness_value,
    witness_value_empirical,
)


def random_set(d, m, rng, frame=False):
    u = bases.random_unitary(d, rng) if frame else None
    return BasisSet(tuple(bases.random_basis(d, rng) for _ in range(m)), u)


def mixed(d):
    return DensityMatrix(d, np.eye(d * d) / d**2)


# witness value


def test_witness_max_entangled_gives_m():
    rng = np.random.default_rng(0)
    for d, m in ((3, 2), (4, 3), (5, 4)):
        bs = random_set(d, m, rng, frame=True)
        rho = DensityMatrix.from_ket(qcore.max_entangled(d, bs.frame), d)
        assert witness_value(rho, bs) == pytest.approx(m, abs=1e-9)


def test_witness_isotropic_example():
    s = witness_value(states.isotropic(5, 0.3), bases.three_mubs(5))
    assert s == pytest.approx(2.28, abs=1e-9)


def test_witness_maximally_mixed():
    bs = BasisSet((bases.computational(4), bases.fourier(4)))
    assert witness_value(mixed(4), bs) == pytest.approx(0.5, abs=1e-12)


def test_witness_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        witness_value(mixed(3), bases.three_mubs(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2**31))
def test_witness_range(d, m, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
    rho = g @ g.conj().T
    rho = DensityMatrix(d, rho / np.trace(rho))
    s = witness_value(rho, random_set(d, m, rng, frame=True))
    assert -1e-12 <= s <= m + 1e-9


def test_witness_frame_changes_value_not_bounds():
    bs = bases.three_mubs(3)
    rho = states.isotropic(3, 0.1)
    moved = bs.with_frame(bases.random_unitary(3, 9))
    assert witness_value(rho, moved) < witness_value(rho, bs) - 1e-3
    assert np.array_equal(tight_bounds(overlap_table(bs)).B, tight_bounds(overlap_table(moved)).B)
    assert np.array_equal(loose_bounds(overlap_table(bs)).B, loose_bounds(overlap_table(moved)).B)
    # transporting the state with the frame restores the value
    u = moved.frame
    op = np.kron(np.eye(3), u)
    transported = DensityMatrix(3, op @ rho.matrix @ op.conj().T)
    assert witness_value(transported, moved) == pytest.approx(witness_value(rho, bs), abs=1e-10)


# empirical estimates


def test_empirical_perfect_correlations():
    c = MeasuredCounts(3, ("a", "b"), (np.eye(3, dtype=int) * 10, np.eye(3, dtype=int) * 7))
    s, err = witness_value_empirical(c)
    assert s == 2 and err == 0


def test_empirical_uniform_counts():
    t = np.full((3, 3), 100)
    s, err = witness_value_empirical(MeasuredCounts(3, ("a", "b"), (t, t)))
    assert s == pytest.approx(2 / 3, abs=1e-12)
    assert err > 0


def test_empirical_single_basis():
    rng = np.random.default_rng(1)
    t = rng.integers(0, 50, size=(4, 4))
    s, _ = witness_value_empirical(MeasuredCounts(4, ("a",), (t,)))
    assert s <= 1


def test_empirical_empty_counts():
    with pytest.raises(EmptyCounts):
        witness_value_empirical(MeasuredCounts(2, ("a",), (np.zeros((2, 2), dtype=int),)))


def test_empirical_converges():
    rho = states.purified_thermal(3, 0.7, 0.3)
    bs = bases.three_mubs(3)
    counts = sample_counts(rho, bs, 100_000, seed=3)
    s, err = witness_value_empirical(counts)
    assert abs(s - witness_value(rho, bs)) <= 4 * err


# tight bounds


def test_tight_mubs():
    for d in (3, 5):
        rep = tight_bounds(overlap_table(bases.three_mubs(d)))
        assert all(abs(g) <= 1e-9 for g in rep.G.values())
        assert rep.lambda_C == pytest.approx(1, abs=1e-9)
        assert rep.T_C == pytest.approx(1, abs=1e-9)
        assert np.allclose(rep.B, np.arange(1, d + 1) * 2 / d + 1, atol=1e-9)


def test_tight_identical_bases():
    d = 4
    c = bases.computational(d)
    rep = tight_bounds(overlap_table(BasisSet((c, c))))
    assert rep.G[(0, 1)] == pytest.approx(2) and rep.G[(1, 0)] == pytest.approx(2)
    assert rep.lambda_C == pytest.approx(0.5 * (1 + math.sqrt(1 + 8 * d)))
    assert rep.T_C == 2


def test_tight_two_mubs_d5():
    rep = tight_bounds(overlap_table(BasisSet((bases.computational(5), bases.fourier(5)))))
    assert rep.B_k(1) == pytest.approx(1.2, abs=1e-12)
    assert rep.B_k(4) == pytest.approx(1.8, abs=1e-12)


def test_tight_invariants_random():
    rng = np.random.default_rng(2)
    for d in (3, 4, 5):
        for m in (2, 3, 4):
            rep = tight_bounds(overlap_table(random_set(d, m, rng)))
            assert rep.lambda_C >= 1
            assert rep.T_C <= m
            assert rep.B[-1] == pytest.approx(m, abs=1e-12)
            if rep.T_C < m:
                assert np.all(np.diff(rep.B) > 0)


def test_mub_bounds_are_smallest():
    rng = np.random.default_rng(3)
    for d in (3, 4, 5):
        mub = tight_bounds(overlap_table(BasisSet((bases.computational(d), bases.fourier(d))))).B
        for _ in range(100):
            other = tight_bounds(overlap_table(random_set(d, 2, rng))).B
            assert np.all(mub <= other + 1e-12)


# loose bounds


def test_loose_L_and_omega_examples():
    assert loose_L(0.3, 0.1, 5) == 2
    L, om = loose_omega(0.3, 0.1, 5)
    assert L == 2 and om == pytest.approx(0.24, abs=1e-12)
    assert loose_L(0.2, 0.2, 5) == 5


def test_loose_mub_point():
    rep = loose_bounds({(0, 1): (0.2, 0.2)}, 5, 2)
    assert rep.Gbar[(0, 1)] == pytest.approx(0, abs=1e-12)
    assert rep.T_bar == pytest.approx(1, abs=1e-12)


def test_loose_integer_boundary():
    # (1 - 3*0.2)/(0.6 - 0.2) sits exactly on 1 and must not round down to 0
    assert loose_L(0.6, 0.2, 3) == 1


def test_loose_validation():
    with pytest.raises(InvalidOverlapSummary):
        loose_bounds({(0, 1): (0.1, 0.2)}, 5, 2)
    with pytest.raises(InvalidOverlapSummary):
        loose_bounds({(0, 1): (0.5, 0.3)}, 5, 2)
    with pytest.raises(InvalidOverlapSummary):
        loose_bounds({(0, 1): (0.15, 0.1)}, 5, 2)
    with pytest.raises(InvalidOverlapSummary):
        loose_bounds({(0, 1): (0.3, 0.1)}, 5, 3)


def test_loose_dominates_tight():
    rng = np.random.default_rng(4)
    for i in range(200):
        d = 3 + i % 4
        t = overlap_table(random_set(d, 2 + i % 3, rng))
        tight, loose = tight_bounds(t), loose_bounds(t)
        assert loose.T_bar >= tight.T_C - 1e-12
        assert np.all(loose.Bbar >= tight.B - 1e-12)
        assert loose.Bbar[-1] == pytest.approx(tight.B[-1])


def test_fourth_power_sum_below_omega():
    rng = np.random.default_rng(5)
    for d in (3, 4, 5, 6):
        t = overlap_table(random_set(d, 3, rng))
        rep = loose_bounds(t)
        sums = t.fourth_power_sums()
        for z, w in itertools.permutations(range(3), 2):
            assert sums[z, w] / d <= rep.Omega[(z, w)] + 1e-12


# fidelity and certification


def test_fidelity_lower_examples():
    assert fidelity_lower(3, 3, 1) == 1
    assert fidelity_lower(0.9, 3, 1) == 0
    assert fidelity_lower(2, 2, 2) == 0
    s = states.witness_closed_isotropic(5, 0.2, 6)
    assert fidelity_lower(s, 6, 1) == pytest.approx(0.808, abs=1e-12)
    assert fidelity_lower(s, 6, 1) <= states.ent_fidelity_isotropic(5, 0.2) + 1e-12


def test_certified_k_margin():
    b = np.array([1.2, 1.4, 1.6, 1.8, 2.0])
    assert certified_k(1.0, b, 1.0) == (1, 0.0)
    k, margin = certified_k(1.5, b, 1.0)
    assert k == 3 and margin == pytest.approx(0.1)
    # equality with a bound does not certify
    assert certified_k(1.2, b, 1.0)[0] == 1


def test_certify_pure_max_entangled():
    rep = certify(states.isotropic(5, 0.0), bases.prime_mubs(5))
    assert rep.certified_k_lower == 5
    assert rep.fidelity_lower == pytest.approx(1, abs=1e-9)


def test_certify_maximally_mixed():
    for mode in ("tight", "loose"):
        rep = certify(mixed(3), bases.three_mubs(3), mode)
        assert rep.certified_k_lower == 1
        assert rep.fidelity_lower == 0
        # a complete MUB set reproduces the true fidelity 1/d^2 of the mixed state
        rep = certify(mixed(3), bases.prime_mubs(3), mode)
        assert rep.certified_k_lower == 1
        assert rep.fidelity_lower == pytest.approx(1 / 9, abs=1e-9)
        assert rep.fidelity_lower <= 1 / 9 + 1e-12


def test_certify_prefers_two_basis_subset_for_drifted_triple():
    d, beta = 5, 0.5
    rho = states.purified_thermal(d, beta, 0.0)
    triple = bases.drifted_triple(d, math.pi)
    full = certify(rho, triple)
    rep3 = tight_bounds(overlap_table(triple))
    s3 = witness_value(rho, triple)
    k3, _ = certified_k(s3, rep3.B, rep3.T_C)
    assert len(full.subset) == 2
    assert full.certified_k_lower > k3


def test_certify_tie_break_is_deterministic():
    bs = bases.prime_mubs(3)
    rho = states.isotropic(3, 0.0)
    a, b = certify(rho, bs), certify(rho, bs)
    assert a == b
    # every subset certifies 3; the full set has the widest margin S - B_2
    assert a.certified_k_lower == 3
    assert a.subset == [0, 1, 2, 3]
    assert a.S_value - a.bounds[1] == pytest.approx(1, abs=1e-9)


def test_certify_with_counts_and_labels():
    bs = bases.three_mubs(3)
    rho = states.isotropic(3, 0.05)
    counts = sample_counts(rho, bs, 20_000, seed=0)
    rep = certify(counts, bs)
    assert rep.S_error is not None and rep.S_error > 0
    assert rep.certified_k_lower >= 2


def test_certify_caps_basis_count():
    c = bases.computational(2)
    with pytest.raises(TooManyBases):
        certify(mixed(2), BasisSet((c,) * 13))


def test_certify_soundness_isotropic_grid():
    bs = bases.prime_mubs(5)
    for p in np.linspace(0, 1, 41):
        rho = states.isotropic(5, p)
        rep = certify(rho, bs)
        assert rep.certified_k_lower <= states.schmidt_number_isotropic(5, p)
        assert rep.fidelity_lower <= states.ent_fidelity_isotropic(5, p) + 1e-9


def test_report_json_round_trip():
    rep = certify(states.isotropic(3, 0.2), bases.three_mubs(3), "loose")
    back = WitnessReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back == rep
    assert 0 <= rep.S_value <= 3 + 1e-9
    assert 1 <= rep.certified_k_lower <= 3


# operator level


def test_witness_operator_properties():
    rng = np.random.default_rng(6)
    bs = random_set(3, 3, rng, frame=True)
    w = witness_operator(bs)
    assert np.allclose(w, w.conj().T)
    assert np.linalg.eigvalsh(w)[0] >= -1e-12
    assert np.trace(w).real == pytest.approx(9)
    rho = states.purified_thermal(3, 0.4, 0.3)
    assert np.trace(w @ rho.matrix).real == pytest.approx(witness_value(rho, bs), abs=1e-9)
    phi = qcore.max_entangled(3, bs.frame)
    assert (phi.conj() @ w @ phi).real == pytest.approx(3, abs=1e-9)


def test_witness_operator_single_computational():
    w = witness_operator(BasisSet((bases.computational(3),)))
    assert np.allclose(w, np.diag(np.eye(3).ravel()))
    assert np.trace(w).real == pytest.approx(3)


def test_witness_operator_isotropic_closed_form():
    bs = BasisSet((bases.computational(3), bases.fourier(3)))
    w = witness_operator(bs)
    for p in (0.0, 0.3, 1.0):
        val = np.trace(w @ states.isotropic(3, p).matrix).real
        assert val == pytest.approx(states.witness_closed_isotropic(3, p, 2), abs=1e-12)


def test_operator_inequality_examples():
    assert operator_inequality_check(BasisSet((bases.computational(3), bases.fourier(3)))) <= 1e-10
    c = bases.computational(3)
    assert operator_inequality_check(BasisSet((c, c))) <= 1e-10
    rng = np.random.default_rng(7)
    for _ in range(50):
        assert operator_inequality_check(random_set(4, 4, rng, frame=True)) <= 1e-8


def test_operator_dimension_caps():
    with pytest.raises(DimensionTooLarge):
        operator_inequality_check(BasisSet((bases.computational(9), bases.fourier(9))))
    with pytest.raises(DimensionTooLarge):
        witness_operator(BasisSet((bases.computational(13),)))


def test_matching_probabilities_split_sum():
    rho = states.isotropic(4, 0.4)
    bs = BasisSet((bases.computational(4), bases.fourier(4)))
    q = matching_probabilities(rho, bs)
    assert q.shape == (2,)
    assert q.sum() == pytest.approx(witness_value(rho, bs))


def test_welch_on_mub_tables():
    vecs = np.hstack([b.matrix for b in bases.prime_mubs(3).bases])
    assert abs(analysis.welch_check(vecs, 2)) <= 1e-9
