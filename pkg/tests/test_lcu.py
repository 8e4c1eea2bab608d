import math

import numpy as np
import pytest

from bechain.encoding import BlockEncoding, dilate_hermitian, hermitian_test_encoding
from bechain.lcu import (
    LCUSpec,
    SIN_PI_14,
    lcu_build,
    lcu_i_minus_h2,
    lcu_w_uh,
    pair_select,
)
from bechain.linalg import (
    PAULI_X,
    PAULI_Z,
    Tolerance,
    haar_unitary,
    is_unitary,
    opnorm,
    random_hermitian,
)


def test_coefficient_identity():
    # the Lemma's error chain: X-branch weight times eps/9 stays within eps/14
    assert math.sqrt(8.0) * SIN_PI_14 / 9.0 <= 1.0 / 14.0


def test_lcu_build_single_term():
    u = haar_unitary(4, np.random.default_rng(0))
    be = lcu_build(LCUSpec((1.0,), (u,), 0))
    np.testing.assert_allclose(be.block(), u, atol=1e-12)


def test_lcu_build_projector():
    be = lcu_build(LCUSpec((0.5, 0.5), (np.eye(2), PAULI_Z), 1))
    np.testing.assert_allclose(be.alpha * be.block(), np.diag([1.0, 0.0]), atol=1e-12)


def test_lcu_build_difference():
    u = haar_unitary(4, np.random.default_rng(1))
    be = lcu_build(LCUSpec((0.5, -0.5), (np.eye(4), u @ u), 1))
    np.testing.assert_allclose(be.alpha * be.block(), (np.eye(4) - u @ u) / 2, atol=1e-12)


def test_lcu_build_random_sums():
    rng = np.random.default_rng(2)
    for trial in range(5):
        nterms = int(rng.integers(2, 5))
        dim = 2 ** int(rng.integers(1, 4))
        coeffs = tuple(rng.standard_normal() + 1j * rng.standard_normal() for _ in range(nterms))
        terms = tuple(haar_unitary(dim, rng) for _ in range(nterms))
        spec = LCUSpec(coeffs, terms, max(1, (nterms - 1).bit_length()))
        be = lcu_build(spec)
        assert is_unitary(be.u, Tolerance(1e-10))
        direct = sum(c * t for c, t in zip(coeffs, terms))
        np.testing.assert_allclose(be.alpha * be.block(), direct, atol=1e-10)


def test_lcu_spec_validation():
    with pytest.raises(ValueError, match="empty"):
        LCUSpec((), (), 1)
    with pytest.raises(ValueError, match="unitary"):
        LCUSpec((1.0,), (np.diag([1.0, 0.5]),), 0)
    with pytest.raises(ValueError, match="prep_dim"):
        LCUSpec((1.0, 1.0, 1.0), tuple(np.eye(2) for _ in range(3)), 1)


def test_pair_select_weights():
    rng = np.random.default_rng(3)
    t1, t2 = haar_unitary(4, rng), haar_unitary(4, rng)
    w = pair_select(0.55, t1, 0.3, t2)
    assert is_unitary(w, Tolerance(1e-12))
    np.testing.assert_allclose(w[:4, :4], 0.55 * t1 + 0.3 * t2, atol=1e-12)
    # signed weights
    w2 = pair_select(0.25, t1, -0.25, t2)
    np.testing.assert_allclose(w2[:4, :4], 0.25 * t1 - 0.25 * t2, atol=1e-12)


def test_lcu_i_minus_h2_scalars():
    be0 = lcu_i_minus_h2(dilate_hermitian(np.array([[0.0]])))
    np.testing.assert_allclose(be0.block(), np.array([[0.5]]), atol=1e-12)
    be6 = lcu_i_minus_h2(dilate_hermitian(np.array([[0.6]])))
    np.testing.assert_allclose(be6.block(), np.array([[0.32]]), atol=1e-12)


def test_lcu_i_minus_h2_random():
    h = random_hermitian(4, 0.9, np.random.default_rng(4))
    vh = hermitian_test_encoding(h, 2, 9)
    out = lcu_i_minus_h2(vh)
    assert out.a == vh.a + 1
    np.testing.assert_allclose(out.block(), (np.eye(4) - h @ h) / 2, atol=1e-10)


def test_lcu_i_minus_h2_spectrum_floor():
    # all eigenvalues of (I−H²)/2 at least (1−(1−δ)²)/2 when ‖H‖ ≤ 1−δ
    delta = 0.3
    h = random_hermitian(4, 1 - delta, np.random.default_rng(5))
    out = lcu_i_minus_h2(dilate_hermitian(h))
    evals = np.linalg.eigvalsh(out.block())
    assert evals.min() >= (1 - (1 - delta) ** 2) / 2 - 1e-12
    assert evals.max() <= 0.5 + 1e-12


def test_lcu_i_minus_h2_rejects_non_hermitian_block():
    u = haar_unitary(4, np.random.default_rng(6))
    with pytest.raises(ValueError, match="Hermitian"):
        lcu_i_minus_h2(BlockEncoding(u, 1, 1))


def _exact_sqrt_encoding(h: np.ndarray) -> BlockEncoding:
    # an exact encoding of sqrt(I−H²)/sqrt(8) for testing lcu_w_uh in isolation
    from bechain.linalg import sqrt_one_minus_sq

    target = sqrt_one_minus_sq(h) / math.sqrt(8.0)
    from bechain.encoding import dilate_general, normalize_selectors, pad_ancillas

    return pad_ancillas(normalize_selectors(dilate_general(target)), 3)


def test_lcu_w_uh_zero_h():
    vh = dilate_hermitian(np.array([[0.0]]))
    w = lcu_w_uh(vh, _exact_sqrt_encoding(np.array([[0.0]])))
    np.testing.assert_allclose(w.block(), SIN_PI_14 * PAULI_X, atol=1e-12)


def test_lcu_w_uh_scalar():
    h = np.array([[0.6]])
    w = lcu_w_uh(dilate_hermitian(h), _exact_sqrt_encoding(h))
    u_h = np.array([[0.6, 0.8], [0.8, -0.6]])
    np.testing.assert_allclose(w.block(), SIN_PI_14 * u_h, atol=1e-12)


def test_lcu_w_uh_error_budget():
    # an eps/9 error on the sqrt branch inflates the block by at most sqrt(8)·s·eps/9
    from bechain.encoding import dilate_general, normalize_selectors, pad_ancillas
    from bechain.linalg import sqrt_one_minus_sq

    h = np.array([[0.4]])
    eps9 = 1e-3
    off_target = sqrt_one_minus_sq(h) / math.sqrt(8.0) + eps9 * np.eye(1)
    perturbed = pad_ancillas(normalize_selectors(dilate_general(off_target)), 3)
    w = lcu_w_uh(dilate_hermitian(h), perturbed)
    u_h = dilate_hermitian(h).u
    err = opnorm(w.block() - SIN_PI_14 * u_h)
    assert err <= math.sqrt(8.0) * SIN_PI_14 * eps9 + 1e-12
    assert err <= (9 * eps9) / 14.0  # the Lemma's eps/14 budget at eps = 9·eps9


def test_lcu_w_uh_register_mismatch():
    vh = dilate_hermitian(np.array([[0.0, 0.0], [0.0, 0.0]]))
    vs = _exact_sqrt_encoding(np.array([[0.0]]))
    with pytest.raises(ValueError, match="mismatch"):
        lcu_w_uh(vh, vs)
