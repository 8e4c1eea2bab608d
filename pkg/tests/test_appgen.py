import numpy as np
import pytest

from bechain.appgen import (
    DysonSpec,
    TrotterSpec,
    controlled_embedding,
    dyson_propagators,
    dyson_sequence,
    dyson_spec_from_json,
    matrix_from_json,
    trotter_sequence,
    trotter_spec_from_json,
)
from bechain.encoding import deviation, deviation_profile
from bechain.linalg import PAULI_X, PAULI_Z, Tolerance, is_unitary, opnorm
from bechain.mcm import block_product, gadget_error_exact, gadget_pmacg, macg_bound


def test_trotter_zero_time():
    encs = trotter_sequence(TrotterSpec((PAULI_Z,), 0.0, 4))
    assert len(encs) == 4
    for be in encs:
        assert deviation(be) <= 1e-14


def test_trotter_single_x_deviation():
    encs = trotter_sequence(TrotterSpec((PAULI_X,), 1.0, 16))
    expected = 2 * abs(np.sin(1.0 / 32.0))
    for be in encs:
        assert deviation(be) == pytest.approx(expected, abs=1e-12)


def test_trotter_commuting_terms_exact():
    # commuting terms have zero splitting error: the block product is e^{-iHt}
    terms = (0.5 * PAULI_Z, 0.25 * PAULI_Z)
    t, k = 1.0, 8
    encs = trotter_sequence(TrotterSpec(terms, t, k))
    h_total = terms[0] + terms[1]
    evals, evecs = np.linalg.eigh(h_total)
    exact = (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T
    np.testing.assert_allclose(block_product(encs), exact, atol=1e-12)


def test_trotter_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        TrotterSpec((np.array([[0.0, 1.0], [0.0, 0.0]]),), 1.0, 2)
    with pytest.raises(ValueError, match="norm"):
        TrotterSpec((2.0 * PAULI_X,), 1.0, 2)


def test_dyson_zero_generator():
    spec = DysonSpec(lambda t: np.zeros((2, 2)), 0.0, 1.0, 4, 32)
    for xi in dyson_propagators(spec):
        np.testing.assert_allclose(xi, np.eye(2), atol=1e-13)


def test_dyson_constant_generator():
    spec = DysonSpec(lambda t: -1j * PAULI_Z, 1.0, 1.0, 8, 64)
    for be in dyson_sequence(spec):
        assert deviation(be) == pytest.approx(2 * np.sin(1.0 / 16.0), abs=1e-10)


def test_dyson_cosine_bound():
    lam = 0.5
    spec = DysonSpec(lambda t: -1j * np.cos(t) * 0.5 * PAULI_X, lam, 1.0, 16, 64)
    dt = 1.0 / 16
    for be in dyson_sequence(spec):
        assert deviation(be) <= np.exp(lam * dt) - 1.0 + 1e-10


def test_dyson_micro_step_doubling():
    # default workload (K = 16 intervals): halving the 256 default micro-steps
    # moves each propagator by well under 1e-8
    spec_lo = DysonSpec(lambda t: -1j * np.cos(t) * 0.5 * PAULI_X, 0.5, 1.0, 16, 128)
    spec_hi = DysonSpec(lambda t: -1j * np.cos(t) * 0.5 * PAULI_X, 0.5, 1.0, 16, 256)
    for lo, hi in zip(dyson_propagators(spec_lo), dyson_propagators(spec_hi)):
        assert opnorm(lo - hi) <= 1e-8


def test_dyson_lambda_violation():
    spec = DysonSpec(lambda t: -2j * PAULI_X, 0.5, 1.0, 2, 32)
    with pytest.raises(ValueError, match="lam"):
        dyson_propagators(spec)


def test_controlled_embedding_deviation_transfer():
    u = np.diag(np.exp([0.05j, -0.05j]))
    be = controlled_embedding(u)
    assert is_unitary(be.u, Tolerance(1e-12))
    assert deviation(be) == pytest.approx(opnorm(u - np.eye(2)), abs=1e-12)


def test_end_to_end_pmacg_bound():
    # generated near-identity sequences satisfy the closed-form bound at the
    # measured c: the controlled embeddings are block diagonal, so the gadget
    # leakage vanishes identically
    encs = trotter_sequence(TrotterSpec((0.5 * PAULI_X, 0.5 * PAULI_Z), 1.0, 16))
    kg = len(encs)
    prof = deviation_profile(encs)
    c = prof.eta_max * kg
    e = gadget_error_exact(gadget_pmacg(encs, 1), block_product(encs))
    assert e <= macg_bound(kg, 1, c)
    assert e <= 1e-12
    for be in encs:
        assert is_unitary(be.u, Tolerance(1e-9))
        assert deviation(be) <= (c / kg) * 1.1


def test_json_loaders():
    mat = matrix_from_json([[[0.0, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.0, 0.0]]])
    np.testing.assert_allclose(mat, 0.5 * PAULI_X, atol=1e-14)

    tspec = trotter_spec_from_json(
        {"terms": [[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]]], "t": 1.0, "K": 4}
    )
    assert tspec.k == 4 and len(tspec.terms) == 1

    dspec = dyson_spec_from_json(
        {
            "generator": {
                "family": "cosine",
                "matrix": [[[0.0, 0.0], [0.0, -0.5]], [[0.0, -0.5], [0.0, 0.0]]],
            },
            "T": 1.0,
            "K": 4,
            "micro_steps": 32,
        }
    )
    got = dspec.a_of_t(0.0)
    np.testing.assert_allclose(got, -0.5j * PAULI_X, atol=1e-14)
    assert dspec.lam == pytest.approx(0.5)

    two = dyson_spec_from_json(
        {"generator": {"family": "two_term_pauli", "c1": 0.3, "c2": 0.2}, "T": 1.0, "K": 2}
    )
    assert two.lam == pytest.approx(0.5)
    with pytest.raises(ValueError, match="family"):
        dyson_spec_from_json({"generator": {"family": "nope"}, "T": 1.0, "K": 2})

def test_dyson_nonunitary_fallback_dilation():
    # contractive generator: propagators are subnormalized, not unitary, and
    # take the Hermitian-dilation path with its <1|.|0> selector convention
    spec = DysonSpec(lambda t: -0.2 * np.eye(2), 0.2, 1.0, 4, 32)
    encs = dyson_sequence(spec)
    props = dyson_propagators(spec)
    for be, xi in zip(encs, props):
        assert opnorm(xi) < 1.0
        assert (be.bra_sel, be.ket_sel) == ("1", "0")
        np.testing.assert_allclose(be.block(), xi, atol=1e-10)
