"""Block encodings: the (α, a, ε) abstraction, unitary dilations, generators.

A block encoding wraps a unitary ``u`` on ``a + n`` qubits together with the
declared scale α and error ε.  By default the encoded matrix sits in the
⟨0^a|·|0^a⟩ corner; general bitstring selectors are stored explicitly and can
be normalized away with :func:`normalize_selectors`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    CMatrix,
    DEFAULT_TOL,
    PAULI_X,
    PAULI_Z,
    Tolerance,
    as_cmatrix,
    haar_unitary,
    herm_funcmat,
    is_hermitian,
    is_unitary,
    kron,
    mat_embed_block,
    opnorm,
    random_hermitian,
    sqrt_one_minus_sq,
)

MAX_QUBITS = 12


@dataclass(frozen=True)
class BlockEncoding:
    """A unitary on ``a + n`` qubits declared as an (alpha, a, eps)-encoding.

    ``bra_sel``/``ket_sel`` are the ancilla basis states selecting the encoded
    block; the default is 0^a on both sides.
    """

    u: CMatrix
    a: int
    n: int
    alpha: float = 1.0
    eps: float = 0.0
    bra_sel: str = ""
    ket_sel: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", as_cmatrix(self.u))
        if self.a < 0 or self.n < 0:
            raise ValueError("register sizes must be non-negative")
        if self.a + self.n > MAX_QUBITS:
            raise ValueError(f"dimension cap exceeded: {self.a + self.n} qubits")
        dim = 2 ** (self.a + self.n)
        if self.u.shape != (dim, dim):
            raise ValueError(f"unitary shape {self.u.shape} does not match a={self.a}, n={self.n}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if not self.bra_sel:
            object.__setattr__(self, "bra_sel", "0" * self.a)
        if not self.ket_sel:
            object.__setattr__(self, "ket_sel", "0" * self.a)
        if len(self.bra_sel) != self.a or len(self.ket_sel) != self.a:
            raise ValueError("selector length must equal the ancilla count")
        if not is_unitary(self.u, DEFAULT_TOL):
            raise ValueError("u is not unitary within 1e-10")

    @property
    def dim(self) -> int:
        return 2 ** (self.a + self.n)

    def block(self) -> CMatrix:
        """The selected 2^n × 2^n block ⟨bra_sel|U|ket_sel⟩ (unscaled)."""
        return mat_embed_block(self.u, self.bra_sel, self.ket_sel, self.a, self.n)


@dataclass(frozen=True)
class DeviationProfile:
    """Per-encoding deviations η_i = ‖U_i − I‖ and their maximum."""

    etas: tuple[float, ...]
    eta_max: float = field(init=False)

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.etas):
            raise ValueError("deviation coefficients must be non-negative")
        object.__setattr__(self, "eta_max", max(self.etas) if self.etas else 0.0)


def verify_encoding(be: BlockEncoding, target: np.ndarray) -> float:
    """Measured encoding error ‖target − α·⟨bra|U|ket⟩‖ (operator norm)."""
    tgt = as_cmatrix(target)
    if tgt.shape != (2**be.n, 2**be.n):
        raise ValueError(f"target shape {tgt.shape} does not match n={be.n}")
    return opnorm(tgt - be.alpha * be.block())


def deviation(be: BlockEncoding) -> float:
    """Operator-norm distance of the encoding unitary from the identity."""
    return opnorm(be.u - np.eye(be.dim))


def deviation_profile(encodings: Sequence[BlockEncoding]) -> DeviationProfile:
    """Measure ‖U_i − I‖ for every encoding (never trusted from metadata)."""
    return DeviationProfile(tuple(deviation(be) for be in encodings))


def _x_string(bits: str) -> CMatrix:
    ops = [PAULI_X if b == "1" else np.eye(2, dtype=complex) for b in bits]
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def normalize_selectors(be: BlockEncoding) -> BlockEncoding:
    """Conjugate with X^{b} on the ancillae so the block sits at 0^a/0^a."""
    if be.bra_sel == "0" * be.a and be.ket_sel == "0" * be.a:
        return be
    eye_n = np.eye(2**be.n)
    left = kron(_x_string(be.bra_sel), eye_n)
    right = kron(_x_string(be.ket_sel), eye_n)
    return BlockEncoding(left @ be.u @ right, be.a, be.n, be.alpha, be.eps)


def dilate_hermitian(h: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> BlockEncoding:
    """Hermitian unitary dilation U = Z⊗H + X⊗√(I−H²), a (1,1,0)-encoding of H."""
    arr = as_cmatrix(h)
    if not is_hermitian(arr, tol):
        raise ValueError("dilate_hermitian needs a Hermitian matrix")
    if opnorm(arr) > 1.0 + 1e-10:
        raise ValueError("not subnormalized: ‖H‖ > 1")
    comp = sqrt_one_minus_sq(arr, tol)
    u = kron(PAULI_Z, arr) + kron(PAULI_X, comp)
    n = int(np.log2(arr.shape[0]))
    return BlockEncoding(u, 1, n)


def dilate_general(a_mat: np.ndarray) -> BlockEncoding:
    """Hermitian unitary dilation of a square ‖A‖ ≤ 1 with A = ⟨1|U|0⟩.

    U = [[√(I−A†A), A†], [A, −√(I−AA†)]]; the two square roots are built from
    the SVD of A with clamping of roundoff-negative values.
    """
    arr = as_cmatrix(a_mat)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError("dilate_general is restricted to square matrices")
    w, sig, vh = np.linalg.svd(arr)
    if sig.size and sig[0] > 1.0 + 1e-10:
        raise ValueError("not subnormalized: ‖A‖ > 1")
    root = np.sqrt(np.clip(1.0 - sig**2, 0.0, None))
    sqrt_ata = (vh.conj().T * root) @ vh       # √(I − A†A)
    sqrt_aat = (w * root) @ w.conj().T         # √(I − AA†)
    dim = arr.shape[0]
    u = np.zeros((2 * dim, 2 * dim), dtype=complex)
    u[:dim, :dim] = sqrt_ata
    u[:dim, dim:] = arr.conj().T
    u[dim:, :dim] = arr
    u[dim:, dim:] = -sqrt_aat
    n = int(np.log2(dim))
    return BlockEncoding(u, 1, n, bra_sel="1", ket_sel="0")


def random_block_encoding(n: int, a: int, seed: int) -> BlockEncoding:
    """Haar-random unitary declared as a (1, a, 0)-encoding of its own block."""
    if n < 1 or a < 1:
        raise ValueError("need n, a >= 1")
    if n + a > 10:
        raise ValueError("dimension cap exceeded: n + a > 10")
    rng = np.random.default_rng(seed)
    return BlockEncoding(haar_unitary(2 ** (n + a), rng), a, n)


def random_near_identity(n: int, a: int, eta: float, seed: int) -> BlockEncoding:
    """Random U = exp(iθG), ‖G‖ = 1, with ‖U − I‖ = 0.9·eta ∈ [0.8·eta, eta]."""
    if n < 1 or a < 1:
        raise ValueError("need n, a >= 1")
    if n + a > 10:
        raise ValueError("dimension cap exceeded: n + a > 10")
    if not 0.0 <= eta < 1.0:
        raise ValueError("eta must lie in [0, 1)")
    dim = 2 ** (n + a)
    if eta == 0.0:
        return BlockEncoding(np.eye(dim, dtype=complex), a, n)
    rng = np.random.default_rng(seed)
    gen = random_hermitian(dim, 1.0, rng)
    theta = 2.0 * np.arcsin(0.45 * eta)  # ‖e^{iθG}−I‖ = 2 sin(θ/2) at ‖G‖ = 1
    u = herm_funcmat(gen, lambda lam: np.exp(1j * theta * lam))
    return BlockEncoding(u, a, n)


def pad_ancillas(be: BlockEncoding, a_total: int) -> BlockEncoding:
    """Prepend identity ancilla qubits so the encoding has ``a_total`` ancillae."""
    if a_total < be.a:
        raise ValueError("cannot shrink the ancilla register")
    if a_total == be.a:
        return be
    extra = a_total - be.a
    u = kron(np.eye(2**extra), be.u)
    return BlockEncoding(
        u, a_total, be.n, be.alpha, be.eps,
        "0" * extra + be.bra_sel, "0" * extra + be.ket_sel,
    )


def scramble_ancillas(be: BlockEncoding, seed: int) -> BlockEncoding:
    """Conjugate with random ancilla unitaries that stabilize |0^a⟩.

    Produces a structurally generic encoding with exactly the same block;
    useful for building a-ancilla test inputs from 1-ancilla dilations.
    """
    if be.bra_sel != "0" * be.a or be.ket_sel != "0" * be.a:
        raise ValueError("normalize selectors before scrambling")
    rng = np.random.default_rng(seed)
    da = 2**be.a
    eye_n = np.eye(2**be.n)

    def stabilizer() -> CMatrix:
        s = np.eye(da, dtype=complex)
        if da > 1:
            s[1:, 1:] = haar_unitary(da - 1, rng)
        return s

    u = kron(stabilizer(), eye_n) @ be.u @ kron(stabilizer(), eye_n)
    return BlockEncoding(u, be.a, be.n, be.alpha, be.eps)


def hermitian_test_encoding(h: np.ndarray, a: int, seed: int) -> BlockEncoding:
    """A generic-looking exact (1, a, 0)-encoding of a Hermitian H."""
    base = dilate_hermitian(h)
    return scramble_ancillas(pad_ancillas(base, a), seed)
