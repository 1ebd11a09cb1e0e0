import math

import numpy as np
import pytest

from schmidtwitness import bases, qcore, states
from schmidtwitness.analysis import thermal_overlap_bounds
from schmidtwitness.qcore import BasisSet, overlap_table
from schmidtwitness.states import IsotropicParams, ThermalParams
from schmidtwitness.witness import certify, fidelity_lower, loose_bounds, tight_bounds, witness_value


def test_isotropic_endpoints():
    phi = qcore.max_entangled(3)
    assert np.allclose(states.isotropic(3, 0).matrix, np.outer(phi, phi))
    assert np.allclose(states.isotropic(3, 1).matrix, np.eye(9) / 9)
    rho = states.isotropic(3, 0.5).matrix
    assert np.trace(rho).real == pytest.approx(1)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        IsotropicParams(3, 1.5)
    with pytest.raises(ValueError):
        ThermalParams(3, -1.0, 0.1)
    ThermalParams(3, 0.0, 0.0)


def test_thermal_beta_zero_is_isotropic():
    for d in (2, 3, 5):
        for p in (0, 0.3, 1):
            diff = states.purified_thermal(d, 0.0, p).matrix - states.isotropic(d, p).matrix
            assert np.max(np.abs(diff)) <= 1e-12


def test_thermal_ground_state_limit():
    rho = states.purified_thermal(3, 50.0, 0.0).matrix
    assert rho[0, 0].real == pytest.approx(1, abs=1e-9)


def test_schmidt_number_isotropic():
    assert states.schmidt_number_isotropic(5, 0) == 5
    assert states.schmidt_number_isotropic(5, 5 / 24 - 1e-9) == 5
    assert states.schmidt_number_isotropic(5, 5 / 24) == 4
    assert states.schmidt_number_isotropic(5, 0.9) == 1
    ps = np.linspace(0, 1, 101)
    ks = [states.schmidt_number_isotropic(5, p) for p in ps]
    assert all(a >= b for a, b in zip(ks, ks[1:]))


def test_witness_closed_isotropic_examples():
    assert states.witness_closed_isotropic(5, 0, 4) == 4
    assert states.witness_closed_isotropic(5, 1, 4) == pytest.approx(0.8)
    assert states.witness_closed_isotropic(5, 0.3, 3) == pytest.approx(2.28)


def test_isotropic_witness_matches_closed_form():
    for d in (2, 3, 5, 7):
        bs = bases.prime_mubs(d)
        for p in np.linspace(0, 1, 11):
            s = witness_value(states.isotropic(d, p), bs)
            assert s == pytest.approx(states.witness_closed_isotropic(d, p, bs.m), abs=1e-9)


def test_ent_fidelity_isotropic():
    assert states.ent_fidelity_isotropic(5, 0) == 1
    assert states.ent_fidelity_isotropic(5, 1) == pytest.approx(1 / 25)
    assert states.ent_fidelity_isotropic(5, 0.2) == pytest.approx(0.808)


def test_tau_thermal():
    assert states.tau_thermal(5, 0.0, 3) == 3
    assert states.tau_thermal(5, 200.0, 3) == pytest.approx(1 + 2 / 5, abs=1e-12)
    rho = states.purified_thermal(5, 0.5, 0.0)
    assert witness_value(rho, bases.drifted_triple(5, 0.0)) == pytest.approx(states.tau_thermal(5, 0.5, 3), abs=1e-9)


def test_thermal_witness_independent_of_drift():
    rho = states.purified_thermal(5, 0.7, 0.25)
    ref = states.witness_closed_thermal(5, 0.7, 0.25, 3)
    for th in (0.0, 0.3, 2.0, math.pi):
        assert witness_value(rho, bases.drifted_triple(5, th)) == pytest.approx(ref, abs=1e-9)


def test_ent_fidelity_thermal():
    assert states.ent_fidelity_thermal(5, 0.0, 0.3) == states.ent_fidelity_isotropic(5, 0.3)
    assert states.ent_fidelity_thermal(5, 2.0, 1.0) == pytest.approx(1 / 25)
    # d=5, beta=1, p=0 evaluated at 30 digits: tanh(5/4)/(5 tanh(1/4))
    assert states.ent_fidelity_thermal(5, 1.0, 0.0) == pytest.approx(0.692706412514415, abs=1e-12)


def test_ent_fidelity_thermal_numeric_cross_check():
    for beta, p in ((1.0, 0.0), (0.4, 0.3), (3.0, 0.1)):
        rho = states.purified_thermal(5, beta, p)
        num = states.fidelity_diagonal_phase_search(rho)
        assert num == pytest.approx(states.ent_fidelity_thermal(5, beta, p), abs=1e-8)


def test_drifted_triple_overlaps():
    d = 5
    t = overlap_table(bases.drifted_triple(d, 0.0))
    assert t.c_min[1, 2] == pytest.approx(1 / d, abs=1e-9)
    assert t.c_max[1, 2] == pytest.approx(1 / d, abs=1e-9)
    for th in (0.05, 1.0, 2.5, math.pi):
        t = overlap_table(bases.drifted_triple(d, th))
        hi, lo = thermal_overlap_bounds(d, th)
        assert lo - 1e-9 <= t.c_min[1, 2] and t.c_max[1, 2] <= hi + 1e-9


def test_fidelity_bounds_sound_on_both_families():
    d = 5
    for th in (0.0, 0.05, 1.0):
        triple = bases.drifted_triple(d, th)
        t = overlap_table(triple)
        for m in (2, 3):
            sub = triple.subset(list(range(m)))
            st = overlap_table(sub)
            tight, loose = tight_bounds(st), loose_bounds(st)
            for beta in (0.0, 0.5, 2.0, 10.0):
                for p in np.linspace(0, 1, 11):
                    rho = states.purified_thermal(d, beta, p)
                    s = witness_value(rho, sub)
                    true = states.ent_fidelity_thermal(d, beta, p)
                    assert fidelity_lower(s, m, tight.T_C) <= true + 1e-9
                    assert fidelity_lower(s, m, loose.T_bar) <= true + 1e-9
        assert t.m == 3


def test_certified_k_never_exceeds_schmidt_number():
    sets = [bases.prime_mubs(5), bases.three_mubs(5), bases.drifted_triple(5, 1.0)]
    rng = np.random.default_rng(0)
    sets.append(BasisSet(tuple(bases.random_basis(5, rng) for _ in range(3))))
    for bs in sets:
        for p in np.linspace(0, 1, 21):
            for mode in ("tight", "loose"):
                rep = certify(states.isotropic(5, p), bs, mode)
                assert rep.certified_k_lower <= states.schmidt_number_isotropic(5, p)
