import itertools
import math

import numpy as np
import pytest

from steersim.errors import DimensionMismatch, IndexOutOfRange
from steersim.mub import SUPPORTED_DIMS, MubFamily, build_mubs
from steersim.qlinalg import random_density, random_unitary
from steersim.states import BipartiteState, isotropic, max_entangled
from steersim.steering import (conditional_state, joint_prob, joint_table, lhs_bound, lhs_max_numeric,
                               p_min_theory, p_min_two_setting, quantum_bound, s_iso_theory,
                               steering_functional, two_setting_violation_max, violation,
                               violation_from_S)


def bloch_grid_lhs(fam, n_theta=400, n_phi=800, refine=3):
    """Exhaustive grid over qubit pure states, refined around the best cell."""
    t_lo, t_hi, f_lo, f_hi = 0.0, np.pi, 0.0, 2 * np.pi
    best = 0.0
    for _ in range(refine):
        th = np.linspace(t_lo, t_hi, n_theta)
        ph = np.linspace(f_lo, f_hi, n_phi)
        T, P = np.meshgrid(th, ph, indexing="ij")
        psi = np.stack([np.cos(T / 2), np.exp(1j * P) * np.sin(T / 2)], axis=-1)
        val = np.zeros(T.shape)
        for x in range(len(fam)):
            val += np.max(np.abs(psi @ fam.vectors[x].conj().T) ** 2, axis=-1)
        i, j = np.unravel_index(np.argmax(val), val.shape)
        best = max(best, val[i, j])
        dt, dp = (t_hi - t_lo) / n_theta, (f_hi - f_lo) / n_phi
        t_lo, t_hi = th[i] - 4 * dt, th[i] + 4 * dt
        f_lo, f_hi = ph[j] - 4 * dp, ph[j] + 4 * dp
    return best


def enumerate_lhs(fam):
    """max over Alice's deterministic outcome assignments of lambda_max(sum of projectors)."""
    best = 0.0
    n = len(fam)
    for choice in itertools.product(range(fam.d), repeat=n):
        sel = fam.vectors[np.arange(n), list(choice)]
        best = max(best, np.linalg.eigvalsh(sel.T @ sel.conj())[-1])
    return best


def test_conditional_state_examples():
    d = 4
    p0 = np.zeros((d, d))
    p0[0, 0] = 1
    sigma, prob = conditional_state(max_entangled(d), p0)
    assert np.allclose(sigma, p0.T / d)
    assert prob == pytest.approx(1 / d)

    rng = np.random.default_rng(0)
    ra, rb = random_density(3, rng), random_density(2, rng)
    proj = build_mubs(3).projector(2, 1)
    sigma, prob = conditional_state(np.kron(ra, rb), proj)
    assert np.allclose(sigma, np.trace(proj @ ra).real * rb)


@pytest.mark.parametrize("d", [3, 4])
def test_no_signalling(d):
    rng = np.random.default_rng(d)
    rho = random_density(d * d, rng)
    fam = build_mubs(d)
    rho_b = np.einsum("ijik->jk", rho.reshape(d, d, d, d))
    for x in range(d + 1):
        tot = sum(conditional_state(rho, fam.projector(x, a))[0] for a in range(d))
        assert np.allclose(tot, rho_b, atol=1e-12)


def test_joint_prob_examples():
    for d in (2, 5):
        fam = build_mubs(d)
        me, mixed = max_entangled(d), isotropic(d, 0)
        for x in range(d + 1):
            for a in range(d):
                assert joint_prob(me, fam, x, a) == pytest.approx(1 / d, abs=1e-12)
                assert joint_prob(mixed, fam, x, a) == pytest.approx(1 / d ** 2, abs=1e-12)
            assert joint_table(isotropic(d, 0.4), fam, x).sum() == pytest.approx(1, abs=1e-12)
    with pytest.raises(IndexOutOfRange):
        joint_prob(max_entangled(2), build_mubs(2), 3, 0)
    with pytest.raises(DimensionMismatch):
        steering_functional(max_entangled(3), build_mubs(2))


def test_joint_prob_is_transpose_form():
    d = 3
    rng = np.random.default_rng(5)
    rho = random_density(d * d, rng)
    fam = build_mubs(d)
    for x in range(d + 1):
        for a in range(d):
            A = fam.projector(x, a)
            direct = np.trace(np.kron(A, A.T) @ rho).real
            assert joint_prob(rho, fam, x, a) == pytest.approx(direct, abs=1e-12)


def test_functional_examples():
    assert steering_functional(isotropic(4, 0.5)).S == pytest.approx(3.125, abs=1e-12)
    for d in (3, 7):
        assert steering_functional(isotropic(d, 0)).S == pytest.approx((d + 1) / d, abs=1e-12)
    rep = steering_functional(max_entangled(11))
    assert rep.S == pytest.approx(12, abs=1e-9)
    assert rep.quantum_bound == 12 and rep.lhs_bound == pytest.approx(1 + math.sqrt(11))
    assert rep.V == pytest.approx(rep.S / rep.lhs_bound)


def test_partial_family_has_no_bounds():
    fam = build_mubs(5).subset([0, 1])
    rep = steering_functional(max_entangled(5), fam)
    assert rep.S == pytest.approx(2)
    assert rep.lhs_bound is None and rep.V is None and rep.violates is None


@pytest.mark.parametrize("d", SUPPORTED_DIMS)
def test_isotropic_exactness(d):
    for p in (0, 0.25, 0.5, 0.75, 1):
        assert steering_functional(isotropic(d, p)).S == pytest.approx(s_iso_theory(d, p), abs=1e-9)


def test_linearity():
    d = 3
    rng = np.random.default_rng(8)
    fam = build_mubs(d)
    for _ in range(5):
        r, s = random_density(9, rng), random_density(9, rng)
        a = rng.uniform()
        mix = steering_functional(a * r + (1 - a) * s, fam).S
        assert mix == pytest.approx(a * steering_functional(r, fam).S + (1 - a) * steering_functional(s, fam).S,
                                    abs=1e-10)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_local_unitary_covariance(d):
    rng = np.random.default_rng(d)
    u = random_unitary(d, rng)
    rho = random_density(d * d, rng)
    fam = build_mubs(d)
    big = np.kron(u, u.conj())
    rotated_state = big @ rho @ big.conj().T
    rotated_fam = MubFamily(d, fam.vectors @ u.T)  # rows phi -> U phi
    assert steering_functional(rotated_state, rotated_fam).S == pytest.approx(
        steering_functional(rho, fam).S, abs=1e-9)


def test_closed_forms():
    assert lhs_bound(4) == 3 and quantum_bound(4) == 5
    assert lhs_bound(11) == pytest.approx(4.3166248, abs=1e-7)
    assert lhs_bound(2) == pytest.approx(2.4142136, abs=1e-7)
    assert violation(11) == pytest.approx(2.77995, abs=1e-5)
    assert violation(4) == pytest.approx(5 / 3)
    assert violation_from_S(2.102 * lhs_bound(11), 11) == pytest.approx(2.102)
    assert 2.102 * lhs_bound(11) == pytest.approx(9.074, abs=1e-3)
    assert two_setting_violation_max(4) == pytest.approx(4 / 3)
    assert two_setting_violation_max(11) == pytest.approx(1.53667, abs=1e-5)
    assert p_min_theory(4) == pytest.approx(7 / 15)
    assert p_min_two_setting(4) == pytest.approx(2 / 3)
    assert p_min_theory(11) == pytest.approx(0.295691, abs=1e-6)
    assert p_min_two_setting(11) == pytest.approx(0.615831, abs=1e-6)
    assert s_iso_theory(11, 0.295691) == pytest.approx(1 + math.sqrt(11), abs=1e-5)
    assert s_iso_theory(6, 1) == 7


def test_monotone_ladders():
    ds = list(SUPPORTED_DIMS)
    v = [violation(d) for d in ds]
    pm = [p_min_theory(d) for d in ds]
    assert all(b > a for a, b in zip(v, v[1:]))
    assert all(b < a for a, b in zip(pm, pm[1:]))
    assert all(violation(d) < 2 for d in (2, 3, 4, 5))
    assert all(violation(d) > 2 for d in (7, 11))
    for d in list(ds) + [101, 10_001]:
        assert two_setting_violation_max(d) < 2
        assert p_min_two_setting(d) > 0.5


def test_lhs_oracle_d2_against_bloch_grid():
    fam = build_mubs(2)
    grid = bloch_grid_lhs(fam)
    assert grid == pytest.approx((3 + math.sqrt(3)) / 2, abs=1e-5)
    assert lhs_max_numeric(fam, restarts=20) == pytest.approx(grid, abs=1e-4)


@pytest.mark.parametrize("d", [3, 4])
def test_lhs_oracle_against_enumeration(d):
    fam = build_mubs(d)
    assert lhs_max_numeric(fam, restarts=100) == pytest.approx(enumerate_lhs(fam), abs=1e-8)


def test_lhs_single_basis_and_bound():
    assert lhs_max_numeric(build_mubs(4).subset([0]), 5) == pytest.approx(1)
    for d in (2, 3, 4, 5):
        assert lhs_max_numeric(build_mubs(d), restarts=100, rng=d) <= lhs_bound(d) + 1e-6
