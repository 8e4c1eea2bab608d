"""Multiple-coherent-measurement circuits and compression gadgets.

An MCM circuit interleaves K block encodings (shared ancilla register, block
selected at 0^a) with m-qubit counter unitaries V_i applied controlled on the
ancilla register being outside 0^a, followed by a final m-qubit unitary Q:

    U = (Q ⊗ U_K) · Π_{i=K-1..1} [ (I⊗Π₀ + V_i⊗Π_⊥) · (I_m ⊗ U_i) ]

Register layout is [measurement m][encoding ancillae a][system n], most
significant first.  ``embe_block`` reads the ⟨0^{m+a}|·|0^{m+a}⟩ corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize

from .encoding import BlockEncoding, deviation_profile, normalize_selectors
from .linalg import (
    CMatrix,
    DEFAULT_TOL,
    as_cmatrix,
    dagger,
    is_unitary,
    kron,
    opnorm,
    proj_perp,
    proj_zero,
)

MAX_TOTAL_QUBITS = 12
ENUMERATION_CAP = 17


def _common_registers(encodings: Sequence[BlockEncoding]) -> tuple[int, int]:
    if not encodings:
        raise ValueError("need at least one block encoding")
    n, a = encodings[0].n, encodings[0].a
    if any(be.n != n or be.a != a for be in encodings):
        raise ValueError("all encodings must share the same (n, a) registers")
    return n, a


@dataclass(frozen=True)
class MCMCircuit:
    """The (V⃗, Q) parameterization of an MCM circuit over K block encodings."""

    encodings: tuple[BlockEncoding, ...]
    m: int
    v_list: tuple[CMatrix, ...]
    q: CMatrix

    def __post_init__(self) -> None:
        encs = tuple(normalize_selectors(be) for be in self.encodings)
        object.__setattr__(self, "encodings", encs)
        object.__setattr__(self, "v_list", tuple(as_cmatrix(v) for v in self.v_list))
        object.__setattr__(self, "q", as_cmatrix(self.q))
        n, a = _common_registers(encs)
        k = len(encs)
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.m == 0 and k > 1:
            raise ValueError("m = 0 is legal only for K = 1")
        if self.m + a + n > MAX_TOTAL_QUBITS:
            raise ValueError("total register exceeds the dimension cap")
        if len(self.v_list) != k - 1:
            raise ValueError(f"expected {k - 1} interleaved unitaries, got {len(self.v_list)}")
        dm = 2**self.m
        for v in self.v_list:
            if v.shape != (dm, dm) or not is_unitary(v, DEFAULT_TOL):
                raise ValueError("every V_i must be an m-qubit unitary")
        if self.q.shape != (dm, dm) or not is_unitary(self.q, DEFAULT_TOL):
            raise ValueError("Q must be an m-qubit unitary")

    @property
    def k(self) -> int:
        return len(self.encodings)

    @property
    def n(self) -> int:
        return self.encodings[0].n

    @property
    def a(self) -> int:
        return self.encodings[0].a


@dataclass(frozen=True)
class MCMRaw:
    """The overparameterized (W⃗, G⃗, B⃗) form of an MCM circuit."""

    encodings: tuple[BlockEncoding, ...]
    m: int
    w_list: tuple[CMatrix, ...]  # K entries, W_j accompanies U_{j+1}
    g_list: tuple[CMatrix, ...]  # K−1 entries
    b_list: tuple[CMatrix, ...]  # K−1 entries

    def __post_init__(self) -> None:
        encs = tuple(normalize_selectors(be) for be in self.encodings)
        object.__setattr__(self, "encodings", encs)
        for name in ("w_list", "g_list", "b_list"):
            object.__setattr__(self, name, tuple(as_cmatrix(x) for x in getattr(self, name)))
        _common_registers(encs)
        k = len(encs)
        if len(self.w_list) != k or len(self.g_list) != k - 1 or len(self.b_list) != k - 1:
            raise ValueError("parameter list lengths must be (K, K-1, K-1)")
        dm = 2**self.m
        for x in (*self.w_list, *self.g_list, *self.b_list):
            if x.shape != (dm, dm) or not is_unitary(x, DEFAULT_TOL):
                raise ValueError("all raw parameters must be m-qubit unitaries")


@dataclass(frozen=True)
class ErrorReport:
    """One row of a gadget-error experiment, serializable to CSV/JSON."""

    k: int
    m: int
    p: int | None
    c: float | None
    eta_max: float
    e_measured: float
    e_bound: float | None
    seed: int
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.e_measured < 0:
            raise ValueError("e_measured must be non-negative")
        ok = True if self.e_bound is None else self.e_measured <= self.e_bound
        object.__setattr__(self, "passed", bool(ok))

    def to_row(self) -> dict:
        return {
            "K": self.k,
            "m": self.m,
            "p": self.p,
            "c": self.c,
            "eta_max": self.eta_max,
            "e_measured": self.e_measured,
            "e_bound": self.e_bound,
            "pass": self.passed,
            "seed": self.seed,
        }


def _mcm_unitary_product(
    enc_mats: Sequence[CMatrix], v_list: Sequence[CMatrix], q: CMatrix,
    m: int, a: int, n: int,
) -> CMatrix:
    dm, dn = 2**m, 2**n
    eye_m = np.eye(dm)
    p0 = kron(proj_zero(a), np.eye(dn))
    pp = kron(proj_perp(a), np.eye(dn))
    out = kron(eye_m, enc_mats[0])
    for i, v in enumerate(v_list):
        ctrl = kron(eye_m, p0) + kron(v, pp)
        out = kron(eye_m, enc_mats[i + 1]) @ ctrl @ out
    return kron(q, np.eye(dn * 2**a)) @ out


def mcm_unitary(circ: MCMCircuit) -> CMatrix:
    """The full 2^{m+a+n} unitary implemented by the circuit."""
    return _mcm_unitary_product(
        [be.u for be in circ.encodings], circ.v_list, circ.q, circ.m, circ.a, circ.n
    )


def raw_unitary(raw: MCMRaw) -> CMatrix:
    """Direct evaluation of the overparameterized (W⃗, G⃗, B⃗) circuit."""
    n, a = _common_registers(raw.encodings)
    dm, dn = 2**raw.m, 2**n
    eye_m = np.eye(dm)
    p0 = kron(proj_zero(a), np.eye(dn))
    pp = kron(proj_perp(a), np.eye(dn))
    out = kron(raw.w_list[0], raw.encodings[0].u)
    for j in range(1, len(raw.encodings)):
        cb = kron(eye_m, p0) + kron(raw.b_list[j - 1], pp)
        cg = kron(raw.g_list[j - 1], p0) + kron(eye_m, pp)
        out = kron(raw.w_list[j], raw.encodings[j].u) @ cg @ cb @ out
    return out


def mcm_from_raw(raw: MCMRaw) -> MCMCircuit:
    """Constructive simplification (W⃗, G⃗, B⃗) → (V⃗, Q), exact to roundoff.

    Each layer (G_j⊗Π₀)(B_j⊗Π_⊥) factors as (G_j⊗I)·C_{Π_⊥}(G_j†B_j); the
    G_j merges into the W to its left, and the accumulated pure-m unitaries
    commute through the controlled layers by conjugating their V's.
    """
    k = len(raw.encodings)
    vstar = [dagger(g) @ b for g, b in zip(raw.g_list, raw.b_list)]
    wprime = [raw.w_list[0]] + [
        raw.w_list[j] @ raw.g_list[j - 1] for j in range(1, k)
    ]
    omega = np.eye(2**raw.m, dtype=complex)
    v_final: list[CMatrix] = []
    for i in range(k - 1):
        omega = wprime[i] @ omega
        v_final.append(dagger(omega) @ vstar[i] @ omega)
    q = wprime[k - 1] @ omega
    return MCMCircuit(raw.encodings, raw.m, tuple(v_final), q)


def embe_block(circ: MCMCircuit) -> CMatrix:
    """The 2^n block ⟨0^{m+a}| U_MCM |0^{m+a}⟩."""
    dn = 2**circ.n
    return mcm_unitary(circ)[:dn, :dn].copy()


def add_unitary(p: int) -> CMatrix:
    """The cyclic increment |x⟩ ↦ |x+1 mod 2^p⟩ on p qubits."""
    if not 1 <= p <= 6:
        raise ValueError("p must lie in [1, 6]")
    dim = 2**p
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        m[(x + 1) % dim, x] = 1.0
    return m


def gadget_naive(encodings: Sequence[BlockEncoding]) -> MCMCircuit:
    """Naive EMBE: one measurement ancilla per intermediate measurement."""
    k = len(encodings)
    if k < 2:
        raise ValueError("need at least two encodings")
    m = k - 1
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    v_list = []
    for i in range(m):
        ops = [x if w == i else np.eye(2) for w in range(m)]
        v_list.append(kron(*ops))
    return MCMCircuit(tuple(encodings), m, tuple(v_list), np.eye(2**m, dtype=complex))


def gadget_lw19(encodings: Sequence[BlockEncoding]) -> MCMCircuit:
    """The exact compression gadget: mod-2^m increments with m = ⌈log₂K⌉."""
    k = len(encodings)
    if k < 2:
        raise ValueError("need at least two encodings")
    m = math.ceil(math.log2(k))
    add = add_unitary(m)
    return MCMCircuit(tuple(encodings), m, tuple([add] * (k - 1)), np.eye(2**m, dtype=complex))


def gadget_pmacg(encodings: Sequence[BlockEncoding], p: int) -> MCMCircuit:
    """The p-qubit modular-addition compression gadget (mod-2^p increments)."""
    if p < 1:
        raise ValueError("p must be at least 1")
    k = len(encodings)
    if k < 2:
        raise ValueError("need at least two encodings")
    add = add_unitary(p)
    return MCMCircuit(tuple(encodings), p, tuple([add] * (k - 1)), np.eye(2**p, dtype=complex))


def block_product(encodings: Sequence[BlockEncoding]) -> CMatrix:
    """A_K ⋯ A_2 A_1 from the encodings' blocks directly."""
    encs = [normalize_selectors(be) for be in encodings]
    out = encs[0].block()
    for be in encs[1:]:
        out = be.block() @ out
    return out


def bad_sequence_oracle(encodings: Sequence[BlockEncoding], x: str) -> CMatrix:
    """S_x = ⟨0^a| U_K · Π_i (projector per x_i) U_i |0^a⟩ by direct products.

    The string reads in operator order: its leftmost character is the
    measurement between U_{K−1} and U_K, the rightmost the one after U_1.
    """
    encs = [normalize_selectors(be) for be in encodings]
    n, a = _common_registers(encs)
    k = len(encs)
    if len(x) != k - 1 or any(c not in "01" for c in x):
        raise ValueError("x must be a bitstring of length K-1")
    dn = 2**n
    p0 = kron(proj_zero(a), np.eye(dn))
    pp = kron(proj_perp(a), np.eye(dn))
    chain = encs[0].u
    for i in range(1, k):
        proj = pp if x[k - 1 - i] == "1" else p0
        chain = encs[i].u @ proj @ chain
    return chain[:dn, :dn].copy()


def _weight_resolved_blocks(encodings: Sequence[BlockEncoding]) -> list[CMatrix]:
    """Σ_{|x| = w} (projector-interleaved chain), resolved by Hamming weight w.

    Pure block algebra on the (a+n)-qubit space; the measurement register is
    never represented, so this is an independent route to the S_x sums.
    """
    encs = [normalize_selectors(be) for be in encodings]
    n, a = _common_registers(encs)
    dn = 2**n
    p0 = kron(proj_zero(a), np.eye(dn))
    pp = kron(proj_perp(a), np.eye(dn))
    layers: list[CMatrix] = [encs[0].u]
    for i in range(1, len(encs)):
        u = encs[i].u
        nxt: list[CMatrix] = []
        for w in range(len(layers) + 1):
            acc = np.zeros_like(layers[0])
            if w < len(layers):
                acc = acc + u @ (p0 @ layers[w])
            if w >= 1:
                acc = acc + u @ (pp @ layers[w - 1])
            nxt.append(acc)
        layers = nxt
    return [mat[:dn, :dn].copy() for mat in layers]


def sum_bad_sequences(
    encodings: Sequence[BlockEncoding],
    p: int,
    method: Literal["auto", "enumerate", "recursion"] = "auto",
) -> CMatrix:
    """Σ_{x ≠ 0, |x| ≡ 0 mod 2^p} S_x — the p-MACG's exact leakage matrix.

    ``enumerate`` sums :func:`bad_sequence_oracle` over qualifying strings
    (capped at K ≤ 17); ``recursion`` uses the weight-resolved block sums.
    """
    k = len(encodings)
    if method == "auto":
        method = "enumerate" if k <= 10 else "recursion"
    period = 2**p
    dn = 2 ** encodings[0].n
    total = np.zeros((dn, dn), dtype=complex)
    if method == "enumerate":
        if k > ENUMERATION_CAP:
            raise ValueError(f"enumeration capped at K <= {ENUMERATION_CAP}")
        for w in range(period, k, period):
            for bad in combinations(range(k - 1), w):
                bits = ["0"] * (k - 1)
                for b in bad:
                    bits[b] = "1"
                total += bad_sequence_oracle(encodings, "".join(bits))
        return total
    if method == "recursion":
        blocks = _weight_resolved_blocks(encodings)
        for w in range(period, k, period):
            total += blocks[w]
        return total
    raise ValueError(f"unknown method {method!r}")


def gadget_error_exact(circ: MCMCircuit, target: np.ndarray) -> float:
    """‖target − ⟨0^{m+a}|U_MCM|0^{m+a}⟩‖ (operator norm)."""
    tgt = as_cmatrix(target)
    if tgt.shape != (2**circ.n, 2**circ.n):
        raise ValueError("target dimension does not match the system register")
    return opnorm(tgt - embe_block(circ))


def macg_bound(k: int, p: int, c: float) -> float:
    """The closed-form p-MACG error bound 2e^c · (e·c²/(K·2^p))^{2^p}.

    Valid in the regime r = (η_max²(K−1)/2^p)^{2^p} ≤ 1/2 with η_max = c/K;
    outside it the geometric-series step of the proof fails and the bound is
    refused.
    """
    if k < 2 or p < 1 or c <= 0:
        raise ValueError("need K >= 2, p >= 1, c > 0")
    period = 2**p
    eta = c / k
    r = (eta**2 * (k - 1) / period) ** period
    if r > 0.5:
        raise ValueError("bound regime not satisfied")
    return 2.0 * math.exp(c) * (math.e * c**2 / (k * period)) ** period


def min_k_for_eps(eps: float, p: int, c: float) -> int:
    """Smallest K with K ≥ (e·c²/2^p)·(2/ε)^{1/2^p}."""
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    period = 2**p
    v = math.e * c**2 / period * (2.0 / eps) ** (1.0 / period)
    k = math.ceil(v - 1e-12)
    return max(k, 1)


def seqnorm_bound_check(
    encodings: Sequence[BlockEncoding], x: str
) -> tuple[float, float]:
    """(‖S_x‖ measured, η_max^{2|x|}·(1+η_max)^K claimed bound)."""
    profile = deviation_profile(encodings)
    eta = profile.eta_max
    weight = x.count("1")
    measured = opnorm(bad_sequence_oracle(encodings, x))
    bound = eta ** (2 * weight) * (1.0 + eta) ** len(encodings)
    return measured, bound


# ---------------------------------------------------------------------------
# Numerical probe of the exact-multiplication ancilla lower bound.
# ---------------------------------------------------------------------------


def _hermitian_basis(dim: int) -> list[CMatrix]:
    basis: list[CMatrix] = []
    for i in range(dim):
        for j in range(i + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[i, j] = sym[j, i] = 1.0
            basis.append(sym)
            asym = np.zeros((dim, dim), dtype=complex)
            asym[i, j] = -1.0j
            asym[j, i] = 1.0j
            basis.append(asym)
    for d in range(1, dim):
        diag = np.zeros((dim, dim), dtype=complex)
        diag[:d, :d] = np.eye(d)
        diag[d, d] = -d
        basis.append(diag)
    return basis


def lower_bound_probe(
    encodings: Sequence[BlockEncoding],
    m: int,
    restarts: int,
    seed: int,
) -> float:
    """Best EMBE residual found by optimizing (V⃗, Q) at measurement width m.

    The unitaries are parameterized as exp(i Σ θ_a G_a) over a traceless
    Hermitian basis (4^m − 1 parameters each) and optimized by multi-restart
    Nelder–Mead with finite-difference (BFGS) refinement.  Evidence only: a
    residual bounded away from zero corroborates, but does not prove, the
    ⌈log₂K⌉ lower bound.
    """
    encs = [normalize_selectors(be) for be in encodings]
    n, a = _common_registers(encs)
    k = len(encs)
    if not (2 <= k <= 4 and 1 <= m <= 2):
        raise ValueError("probe supports K in [2, 4] and m in [1, 2]")
    if m > math.ceil(math.log2(k)):
        raise ValueError("probe is for widths at or below the ⌈log₂K⌉ bound")
    target = block_product(encs)
    basis = np.stack(_hermitian_basis(2**m))
    per = basis.shape[0]  # 4^m − 1
    nparams = per * k  # K−1 interleaved V's plus Q
    dn = 2**n
    dm = 2**m
    # constant factors of the circuit product, precomputed once
    eye_m = np.eye(dm)
    p0 = kron(proj_zero(a), np.eye(dn))
    pp = kron(proj_perp(a), np.eye(dn))
    lifted = [kron(eye_m, be.u) for be in encs]
    p0_full = kron(eye_m, p0)

    def unit(theta: np.ndarray) -> CMatrix:
        gen = np.tensordot(theta, basis, axes=1)
        evals, evecs = np.linalg.eigh(gen)
        return (evecs * np.exp(1j * evals)) @ evecs.conj().T

    def residual(theta: np.ndarray) -> float:
        mats = [unit(theta[i * per : (i + 1) * per]) for i in range(k)]
        out = lifted[0]
        for i in range(k - 1):
            out = lifted[i + 1] @ ((p0_full + kron(mats[i], pp)) @ out)
        block = (kron(mats[-1], np.eye(p0.shape[0])) @ out)[:dn, :dn]
        return opnorm(target - block)

    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        x0 = rng.uniform(-1.5, 1.5, nparams)
        res = minimize(
            residual, x0, method="Nelder-Mead",
            options={"maxiter": 900, "fatol": 1e-13, "xatol": 1e-11},
        )
        best = min(best, float(res.fun))
        polish = minimize(residual, res.x, method="BFGS",
                          options={"maxiter": 80, "gtol": 1e-12})
        best = min(best, float(polish.fun))
        if best <= 1e-10:
            break
    return best
