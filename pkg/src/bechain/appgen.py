"""Near-identity block-encoding sequences from the two motivating applications.

Trotterized Hamiltonian simulation and Dyson time-marching both factor the
evolution into K short-time operators with ‖I − U_step‖ = O(1/K); the
controlled embedding |0⟩⟨0|⊗U_step + |1⟩⟨1|⊗I carries that deviation over to
the block encoding, which is exactly the regime the modular-addition gadget
needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .encoding import BlockEncoding, dilate_general
from .linalg import (
    CMatrix,
    DEFAULT_TOL,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    Tolerance,
    as_cmatrix,
    herm_funcmat,
    is_hermitian,
    is_unitary,
    opnorm,
)

_PAULIS = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


@dataclass(frozen=True)
class TrotterSpec:
    """Hamiltonian terms (each ‖H_i‖ ≤ 1), total time, and step count."""

    terms: tuple[CMatrix, ...]
    t: float
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(as_cmatrix(h) for h in self.terms))
        if not self.terms:
            raise ValueError("need at least one Hamiltonian term")
        if self.k < 1:
            raise ValueError("step count must be positive")
        dims = {h.shape for h in self.terms}
        if len(dims) != 1:
            raise ValueError("terms must share a common dimension")
        for h in self.terms:
            if not is_hermitian(h, DEFAULT_TOL):
                raise ValueError("every term must be Hermitian")
            if opnorm(h) > 1.0 + 1e-10:
                raise ValueError("term norm exceeds 1")


@dataclass(frozen=True)
class DysonSpec:
    """Matrix-valued generator A(t) with ‖A(t)‖ ≤ lam, marched over K intervals."""

    a_of_t: Callable[[float], np.ndarray]
    lam: float
    t_total: float
    k: int
    micro_steps: int = 256

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("interval count must be positive")
        if self.micro_steps < 32:
            raise ValueError("micro_steps must be at least 32")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")


def controlled_embedding(u_step: CMatrix) -> BlockEncoding:
    """|0⟩⟨0|⊗U + |1⟩⟨1|⊗I: a 1-ancilla encoding inheriting ‖I−U‖ exactly."""
    u = as_cmatrix(u_step)
    dim = u.shape[0]
    full = np.zeros((2 * dim, 2 * dim), dtype=complex)
    full[:dim, :dim] = u
    full[dim:, dim:] = np.eye(dim)
    return BlockEncoding(full, 1, int(np.log2(dim)))


def trotter_sequence(spec: TrotterSpec) -> list[BlockEncoding]:
    """K repetitions of the first-order splitting, one encoding per factor.

    The list is in application order: entry 0 is applied first, so the
    product of the blocks (last·…·first) matches the first-order Trotter
    approximation of e^{−iHt}.
    """
    dt = spec.t / spec.k
    steps = [
        herm_funcmat(h, lambda lam: np.exp(-1j * dt * lam)) for h in spec.terms
    ]
    encodings: list[BlockEncoding] = []
    for _ in range(spec.k):
        for u_step in steps:
            encodings.append(controlled_embedding(u_step))
    return encodings


def dyson_propagators(spec: DysonSpec) -> list[CMatrix]:
    """Ξ_j over each interval by a midpoint-exponential micro-step product."""
    dt = spec.t_total / spec.k
    h = dt / spec.micro_steps
    out: list[CMatrix] = []
    for j in range(spec.k):
        t0 = j * dt
        xi = None
        for s in range(spec.micro_steps):
            a_mid = as_cmatrix(spec.a_of_t(t0 + (s + 0.5) * h))
            if opnorm(a_mid) > spec.lam + 1e-8:
                raise ValueError(f"‖A(t)‖ exceeds lam at t = {t0 + (s + 0.5) * h}")
            step = expm(a_mid * h)
            xi = step if xi is None else step @ xi
        out.append(xi)
    return out


def dyson_sequence(spec: DysonSpec) -> list[BlockEncoding]:
    """Encodings of the interval propagators Ξ_j, in application order.

    Unitary propagators (anti-Hermitian generators) get the controlled
    1-ancilla embedding; subnormalized non-unitary ones fall back to the
    Hermitian dilation with its ⟨1|·|0⟩ selector convention.
    """
    encodings: list[BlockEncoding] = []
    for xi in dyson_propagators(spec):
        if is_unitary(xi, Tolerance(1e-9)):
            encodings.append(controlled_embedding(xi))
        elif opnorm(xi) <= 1.0 + 1e-12:
            encodings.append(dilate_general(xi))
        else:
            raise ValueError("propagator is neither unitary nor subnormalized")
    return encodings


# ---------------------------------------------------------------------------
# JSON-configurable generator families.
# ---------------------------------------------------------------------------


def matrix_from_json(entries: Sequence[Sequence[Sequence[float]]]) -> CMatrix:
    """Parse a matrix given as nested [re, im] pairs."""
    rows = [[complex(cell[0], cell[1]) for cell in row] for row in entries]
    return as_cmatrix(np.array(rows))


def trotter_spec_from_json(cfg: dict) -> TrotterSpec:
    terms = tuple(matrix_from_json(m) for m in cfg["terms"])
    return TrotterSpec(terms, float(cfg["t"]), int(cfg["K"]))


def _family_callable(cfg: dict) -> tuple[Callable[[float], CMatrix], float]:
    family = cfg["family"]
    if family == "constant":
        mat = matrix_from_json(cfg["matrix"])
        return (lambda t: mat), opnorm(mat)
    if family == "cosine":
        mat = matrix_from_json(cfg["matrix"])
        omega = float(cfg.get("omega", 1.0))
        phase = float(cfg.get("phase", 0.0))
        return (lambda t: np.cos(omega * t + phase) * mat), opnorm(mat)
    if family == "two_term_pauli":
        p1 = _PAULIS[cfg.get("pauli1", "X")]
        p2 = _PAULIS[cfg.get("pauli2", "Z")]
        c1 = float(cfg.get("c1", 0.5))
        c2 = float(cfg.get("c2", 0.5))
        omega = float(cfg.get("omega", 1.0))

        def a_of_t(t: float) -> CMatrix:
            return -1j * (c1 * np.cos(omega * t) * p1 + c2 * np.sin(omega * t) * p2)

        return a_of_t, abs(c1) + abs(c2)
    raise ValueError(f"unknown generator family {family!r}")


def dyson_spec_from_json(cfg: dict) -> DysonSpec:
    a_of_t, lam_auto = _family_callable(cfg["generator"])
    return DysonSpec(
        a_of_t,
        float(cfg.get("lam", lam_auto)),
        float(cfg["T"]),
        int(cfg["K"]),
        int(cfg.get("micro_steps", 256)),
    )
