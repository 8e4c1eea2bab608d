"""Dense complex linear algebra foundation.

Everything in the package manipulates plain ``numpy`` arrays of complex128
("CMatrix" values): dense matrices with the register convention that the
leftmost tensor factor is the most significant block of the index, i.e. a
state on ``a`` ancilla qubits and ``n`` system qubits is indexed as
``anc_index * 2**n + sys_index``.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import numpy.typing as npt

CMatrix = npt.NDArray[np.complex128]

# Pauli matrices and friends, used as building blocks throughout.
ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
S_GATE = np.diag([1.0, 1.0j]).astype(complex)


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair for matrix comparisons."""

    atol: float = 1e-10
    rtol: float = 0.0

    def __post_init__(self) -> None:
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be non-negative")


DEFAULT_TOL = Tolerance(1e-10, 0.0)


def as_cmatrix(m: npt.ArrayLike) -> CMatrix:
    """Coerce to a 2-D complex128 array and check all entries are finite."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite entries")
    return arr


def opnorm(m: npt.ArrayLike) -> float:
    """Operator norm (largest singular value) of a dense matrix.

    Raises
    ------
    ValueError
        If the matrix has a zero dimension.
    """
    arr = as_cmatrix(m)
    if arr.size == 0:
        raise ValueError("empty matrix")
    return float(np.linalg.svd(arr, compute_uv=False)[0])


def is_unitary(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``‖M†M − I‖ ≤ atol`` and ``‖MM† − I‖ ≤ atol``."""
    arr = as_cmatrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"non-square matrix of shape {arr.shape}")
    eye = np.eye(arr.shape[0])
    return (
        opnorm(arr.conj().T @ arr - eye) <= tol.atol
        and opnorm(arr @ arr.conj().T - eye) <= tol.atol
    )


def is_hermitian(m: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> bool:
    arr = as_cmatrix(m)
    if arr.shape[0] != arr.shape[1]:
        return False
    return opnorm(arr - arr.conj().T) <= tol.atol


def dagger(m: npt.ArrayLike) -> CMatrix:
    return as_cmatrix(m).conj().T


def kron(*ops: npt.ArrayLike) -> CMatrix:
    """Kronecker product of one or more matrices, leftmost = most significant."""
    if not ops:
        raise ValueError("kron of no factors")
    out = as_cmatrix(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_cmatrix(op))
    return out


def herm_funcmat(
    h: npt.ArrayLike,
    f: Callable[[npt.NDArray[np.float64]], npt.ArrayLike],
    tol: Tolerance = DEFAULT_TOL,
) -> CMatrix:
    """Apply a real function to a Hermitian matrix spectrally: f(H) = V f(Λ) V†.

    ``f`` receives the (real) eigenvalue array and must return finite values on
    the whole spectrum; an eigenvalue outside the function's domain raises a
    ``ValueError`` naming the offending eigenvalue.
    """
    arr = as_cmatrix(h)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError("herm_funcmat needs a square matrix")
    if not is_hermitian(arr, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    # Numerical drift from products: symmetrize before the eigensolver.
    sym = (arr + arr.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(sym)
    with np.errstate(all="ignore"):
        fvals = np.asarray(f(evals), dtype=complex)
    if fvals.shape != evals.shape:
        raise ValueError("f must map the eigenvalue array elementwise")
    bad = ~np.isfinite(fvals)
    if np.any(bad):
        raise ValueError(
            f"eigenvalue {evals[bad][0]!r} outside the domain of the function"
        )
    return (evecs * fvals) @ evecs.conj().T


def sqrt_one_minus_sq(h: npt.ArrayLike, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """√(I − H²) for Hermitian ‖H‖ ≤ 1, clamping roundoff-negative eigenvalues."""

    def f(lam: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        one_minus = 1.0 - lam**2
        if np.any(one_minus < -1e-12):
            raise ValueError("not subnormalized: an eigenvalue exceeds 1 in magnitude")
        return np.sqrt(np.clip(one_minus, 0.0, None))

    return herm_funcmat(h, f, tol)


def bit_index(bits: str) -> int:
    """Index of the computational basis state for a bitstring (msb first)."""
    if bits == "":
        return 0
    if any(c not in "01" for c in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def mat_embed_block(
    u: npt.ArrayLike, bra: str, ket: str, a: int, n: int
) -> CMatrix:
    """Extract the 2^n × 2^n block ⟨bra| U |ket⟩ over the leading a qubits."""
    arr = as_cmatrix(u)
    if len(bra) != a or len(ket) != a:
        raise ValueError("selector length must equal the ancilla count")
    dim = 2 ** (a + n)
    if arr.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got {arr.shape}")
    sub = 2**n
    i = bit_index(bra) * sub
    j = bit_index(ket) * sub
    return arr[i : i + sub, j : j + sub].copy()


def proj_zero(a: int) -> CMatrix:
    """|0^a⟩⟨0^a| on a qubits."""
    p = np.zeros((2**a, 2**a), dtype=complex)
    p[0, 0] = 1.0
    return p


def proj_perp(a: int) -> CMatrix:
    """I − |0^a⟩⟨0^a| on a qubits."""
    return np.eye(2**a, dtype=complex) - proj_zero(a)


def permute_qubits(u: npt.ArrayLike, order: Sequence[int]) -> CMatrix:
    """Reorder the tensor factors of a multi-qubit operator.

    ``order[q]`` is the old position (0 = most significant) of the qubit that
    ends up at new position ``q``.
    """
    arr = as_cmatrix(u)
    nq = len(order)
    if arr.shape != (2**nq, 2**nq):
        raise ValueError("operator size does not match the qubit count")
    if sorted(order) != list(range(nq)):
        raise ValueError(f"not a permutation: {order}")
    src = np.zeros(2**nq, dtype=np.int64)
    for new_idx in range(2**nq):
        old_idx = 0
        for q in range(nq):
            bit = (new_idx >> (nq - 1 - q)) & 1
            old_idx |= bit << (nq - 1 - order[q])
        src[new_idx] = old_idx
    return arr[np.ix_(src, src)]


def interleave_middle(op_main: npt.ArrayLike, op_mid: npt.ArrayLike, split: int) -> CMatrix:
    """Tensor ``op_mid`` (one qubit) between qubit ``split-1`` and ``split`` of op_main.

    ``op_main`` acts on ``k`` qubits; the result acts on ``k+1`` qubits laid out
    as [first ``split`` qubits of op_main][op_mid qubit][rest of op_main].
    """
    main = as_cmatrix(op_main)
    k = int(np.log2(main.shape[0]))
    if 2**k != main.shape[0]:
        raise ValueError("operator dimension is not a power of two")
    raw = kron(main, op_mid)  # layout: [main k qubits][mid]
    order = list(range(split)) + [k] + list(range(split, k))
    return permute_qubits(raw, order)


def householder_column(v: npt.ArrayLike) -> CMatrix:
    """Unitary (phase times Householder reflection) whose first column is v.

    The reflection maps e₀ onto the phase-rotated copy of v whose first
    component is real non-negative; the factored-out phase restores v itself,
    which keeps the construction exact for complex vectors.
    """
    vec = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("column must be a unit vector")
    dim = vec.size
    phase = vec[0] / abs(vec[0]) if abs(vec[0]) > 1e-14 else 1.0
    tgt = np.conj(phase) * vec
    e0 = np.zeros(dim, dtype=complex)
    e0[0] = 1.0
    w = e0 - tgt
    wn = np.linalg.norm(w)
    if wn < 1e-14:
        return phase * np.eye(dim, dtype=complex)
    w /= wn
    refl = np.eye(dim, dtype=complex) - 2.0 * np.outer(w, w.conj())
    return phase * refl


def random_hermitian(dim: int, norm: float, rng: np.random.Generator) -> CMatrix:
    """Random (GUE-direction) Hermitian matrix scaled to operator norm ``norm``."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2.0
    cur = opnorm(h)
    if cur == 0.0:
        return np.zeros((dim, dim), dtype=complex)
    return h * (norm / cur)


def haar_unitary(dim: int, rng: np.random.Generator) -> CMatrix:
    """Haar-random unitary via complex Gaussian + QR with R-diagonal phase fix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases
