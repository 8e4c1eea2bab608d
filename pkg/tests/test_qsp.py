import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as np_cheb

from bechain.encoding import dilate_hermitian, hermitian_test_encoding
from bechain.lcu import lcu_i_minus_h2
from bechain.linalg import Tolerance, herm_funcmat, is_unitary, opnorm, random_hermitian
from bechain.qsp import (
    ChebPoly,
    PhaseFactors,
    approx_half_sqrt,
    chebyshev_phases,
    qsp_eval,
    qsp_poly_value,
    qsvt_apply,
    solve_phases,
)


def cheb_t(d: int) -> ChebPoly:
    coeffs = np.zeros(d + 1)
    coeffs[d] = 1.0
    return ChebPoly(coeffs, "even" if d % 2 == 0 else "odd", d)


# --- polynomial construction -------------------------------------------------


def test_half_sqrt_quarter_domain():
    p = approx_half_sqrt(0.25, 1e-2)
    grid = np.linspace(0.25, 1.0, 10_000)
    assert np.max(np.abs(p(grid) - 0.5 * np.sqrt(grid))) <= 1e-2
    assert abs(p(1.0) - 0.5) <= 1e-2
    assert p.sup_norm() <= 1.0


def test_half_sqrt_loose_target_low_degree():
    p = approx_half_sqrt(0.5, 0.3)
    assert p.degree <= 8


def test_half_sqrt_even_parity():
    p = approx_half_sqrt(0.3, 1e-3)
    assert p.parity == "even"
    assert np.all(p.coeffs[1::2] == 0)


def test_half_sqrt_degree_scaling():
    # degree grows at most linearly in log(1/eta) at fixed delta: doubling
    # log(1/eta) at most doubles the degree up to an additive constant
    d1 = approx_half_sqrt(0.25, 1e-2).degree
    d2 = approx_half_sqrt(0.25, 1e-3).degree
    d3 = approx_half_sqrt(0.25, 1e-4).degree
    assert d1 <= d2 <= d3
    assert (d3 - d2) <= (d2 - d1) + 4  # log-linear increments
    assert d3 <= 2 * d2 + 4  # doubling log(1/eta) from 1e-2 to 1e-4


def test_half_sqrt_validation():
    with pytest.raises(ValueError):
        approx_half_sqrt(0.0, 1e-2)
    with pytest.raises(ValueError):
        approx_half_sqrt(0.25, 0.6)


# --- QSP evaluation ----------------------------------------------------------


def test_zero_phase_invariant_chebyshev():
    xs = np.linspace(-1.0, 1.0, 21)
    for d in range(1, 32):
        phi = chebyshev_phases(d)
        for x in xs:
            got = qsp_eval(phi, x)[0, 0]
            assert abs(got - np_cheb.chebval(x, [0] * d + [1])) <= 1e-10


def test_qsp_eval_unitary_on_grid():
    phi = PhaseFactors(np.array([0.3, -0.7, 0.1, -0.7, 0.3]), "even")
    for x in np.linspace(-1, 1, 17):
        assert is_unitary(qsp_eval(phi, x), Tolerance(1e-12))


def test_t7_at_sin_pi_14():
    val = qsp_eval(chebyshev_phases(7), math.sin(math.pi / 14.0))[0, 0]
    assert abs(val - (-1.0)) <= 1e-12


def test_qsp_eval_at_x_one():
    phi = PhaseFactors(np.array([0.2, 0.5, 0.2]), "even")
    got = qsp_eval(phi, 1.0)[0, 0]
    assert abs(got - np.exp(1j * (0.2 + 0.5 + 0.2))) <= 1e-12


def test_qsp_eval_domain():
    with pytest.raises(ValueError):
        qsp_eval(chebyshev_phases(2), 1.5)


# --- phase solving -----------------------------------------------------------


def test_solve_phases_t1():
    phi = solve_phases(cheb_t(1))
    xs = np.cos(np.pi * np.arange(100) / 99)
    assert np.max(np.abs(qsp_poly_value(phi, xs) - xs)) <= 1e-10


def test_solve_phases_t3():
    phi = solve_phases(cheb_t(3))
    assert abs(qsp_eval(phi, 0.5)[0, 0] - (-1.0)) <= 1e-10  # T3(0.5) = -1


def test_solve_phases_half_sqrt():
    p = approx_half_sqrt(0.25, 1e-3).rescaled(0.999)
    phi = solve_phases(p)
    assert phi.residual <= 1e-8


def test_solve_phases_random_targets():
    rng = np.random.default_rng(10)
    for d in (6, 11, 16):
        coeffs = np.zeros(d + 1)
        coeffs[d % 2 :: 2] = rng.standard_normal(len(coeffs[d % 2 :: 2]))
        p = ChebPoly(coeffs, "even" if d % 2 == 0 else "odd", d)
        p = p.rescaled(0.9 / p.sup_norm())
        phi = solve_phases(p)
        assert phi.residual <= 1e-8


def test_solve_phases_rejects_norm_above_one():
    p = cheb_t(2).rescaled(1.2)
    with pytest.raises(ValueError, match="rescale"):
        solve_phases(p)


def test_phase_factors_json_roundtrip():
    phi = solve_phases(cheb_t(3))
    back = PhaseFactors.from_json(phi.to_json())
    np.testing.assert_allclose(back.phases, phi.phases)
    assert back.parity == phi.parity
    assert back.residual == phi.residual


# --- QSVT --------------------------------------------------------------------


def test_qsvt_identity_polynomial():
    be = hermitian_test_encoding(random_hermitian(2, 0.8, np.random.default_rng(1)), 2, 3)
    phi = solve_phases(cheb_t(1))
    out = qsvt_apply(phi, be)
    assert out.a == be.a + 1
    np.testing.assert_allclose(out.block(), be.block(), atol=1e-9)


def test_qsvt_zero_phases_t2():
    h = random_hermitian(4, 0.9, np.random.default_rng(2))
    out = qsvt_apply(chebyshev_phases(2), dilate_hermitian(h))
    np.testing.assert_allclose(out.block(), 2 * h @ h - np.eye(4), atol=1e-10)


def test_qsvt_half_sqrt_on_step1():
    # the Step-2 claim: P applied to (I−H²)/2 lands within eps/9 of sqrt(I−H²)/sqrt(8)
    eps = 9e-3
    h = random_hermitian(4, 0.75, np.random.default_rng(3))
    step1 = lcu_i_minus_h2(dilate_hermitian(h))
    p = approx_half_sqrt(0.25, eps / 9.0)
    out = qsvt_apply(solve_phases(p), step1)
    target = herm_funcmat(h, lambda x: np.sqrt(1 - x**2)) / math.sqrt(8.0)
    assert opnorm(out.block() - target) <= eps / 9.0


@settings(deadline=None, max_examples=8)
@given(seed=st.integers(0, 10**6))
def test_qsvt_spectral_consistency(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(2 ** int(rng.integers(1, 3)), 0.9, rng)
    be = hermitian_test_encoding(h, int(rng.integers(1, 3)), seed + 1)
    d = int(rng.integers(2, 12))
    coeffs = np.zeros(d + 1)
    coeffs[d % 2 :: 2] = rng.standard_normal(len(coeffs[d % 2 :: 2]))
    p = ChebPoly(coeffs, "even" if d % 2 == 0 else "odd", d)
    p = p.rescaled(0.9 / p.sup_norm())
    out = qsvt_apply(solve_phases(p), be)
    oracle = herm_funcmat(h, lambda x: p(x))
    assert opnorm(out.block() - oracle) <= 1e-8
    assert is_unitary(out.u, Tolerance(1e-10))


def test_qsvt_parity_mismatch():
    with pytest.raises(ValueError, match=r"parity"):
        PhaseFactors(np.zeros(3), "odd")


def test_chebpoly_parity_validation():
    with pytest.raises(ValueError, match="odd coefficients"):
        ChebPoly(np.array([0.1, 0.2, 0.3]), "even", 2)

def test_qsvt_singular_value_transform_nonhermitian():
    # the stated contract on a non-Hermitian block: odd parity transforms the
    # singular triple W P(Σ) V†, even parity the right basis V P(Σ) V†
    from bechain.encoding import random_block_encoding

    be = random_block_encoding(2, 1, 123)
    m = be.block()
    w, sig, vh = np.linalg.svd(m)
    for d in (5, 6):
        rng = np.random.default_rng(d)
        coeffs = np.zeros(d + 1)
        coeffs[d % 2 :: 2] = rng.standard_normal(coeffs[d % 2 :: 2].size)
        p = ChebPoly(coeffs, "even" if d % 2 == 0 else "odd", d)
        p = p.rescaled(0.9 / p.sup_norm())
        out = qsvt_apply(solve_phases(p), be)
        if d % 2 == 1:
            oracle = (w * p(sig)) @ vh
        else:
            oracle = (vh.conj().T * p(sig)) @ vh
        assert opnorm(out.block() - oracle) <= 1e-10
