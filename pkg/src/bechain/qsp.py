"""Chebyshev approximation of ½√x, QSP phase solving, and QSVT application.

Convention: the single-qubit signal operator is the rotation form
``W(x) = [[x, i√(1−x²)], [i√(1−x²), x]]`` with interleaved ``e^{iφZ}``
rotations ("wx" convention), so the all-zero phase vector of length d+1
realizes the Chebyshev polynomial T_d.  A solved phase vector Φ realizes a
real target polynomial p as ``Re⟨0|U_Φ(x)|0⟩ = p(x)``; the matrix-level lift
(:func:`qsvt_apply`) recovers the real part by averaging the ±Φ sequences on
one extra ancilla, so block-level results are convention independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as np_cheb
from scipy.optimize import least_squares, linprog

from .encoding import BlockEncoding, normalize_selectors
from .linalg import CMatrix, HADAMARD, kron

MAX_DEGREE = 512
_QSP_SUP_LIMIT = 1.0 - 1e-6
_LP_SUP_BOUND = 0.98
_FIT_DOMAIN_MARGIN = 0.8


@dataclass(frozen=True)
class ChebPoly:
    """Real polynomial in the Chebyshev basis, Σ_k coeffs[k]·T_k(x)."""

    coeffs: np.ndarray
    parity: str  # "even" | "odd" | "none"
    degree: int

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        object.__setattr__(self, "coeffs", c)
        if self.degree != c.size - 1:
            raise ValueError("degree must equal len(coeffs) - 1")
        if self.parity == "even" and np.any(np.abs(c[1::2]) > 1e-13):
            raise ValueError("even polynomial has nonzero odd coefficients")
        if self.parity == "odd" and np.any(np.abs(c[0::2]) > 1e-13):
            raise ValueError("odd polynomial has nonzero even coefficients")
        if self.parity not in ("even", "odd", "none"):
            raise ValueError(f"unknown parity {self.parity!r}")

    def __call__(self, x):
        return np_cheb.chebval(x, self.coeffs)

    def sup_norm(self, lo: float = -1.0, hi: float = 1.0, npts: int = 4001) -> float:
        grid = np.linspace(lo, hi, npts)
        return float(np.max(np.abs(self(grid))))

    def rescaled(self, factor: float) -> "ChebPoly":
        return ChebPoly(self.coeffs * factor, self.parity, self.degree)


@dataclass(frozen=True)
class PhaseFactors:
    """QSP phases (radians) in the fixed "wx" convention, length degree+1."""

    phases: np.ndarray
    parity: str
    residual: float = 0.0
    convention: str = "wx"

    def __post_init__(self) -> None:
        p = np.asarray(self.phases, dtype=float)
        object.__setattr__(self, "phases", p)
        if p.ndim != 1 or p.size < 1:
            raise ValueError("phases must be a non-empty 1-D array")
        d = p.size - 1
        if self.parity != ("even" if d % 2 == 0 else "odd"):
            raise ValueError("parity does not match the phase count")
        if self.convention != "wx":
            raise ValueError("only the wx convention is supported")

    @property
    def degree(self) -> int:
        return self.phases.size - 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "degree": self.degree,
                "parity": self.parity,
                "phases": list(self.phases),
                "residual": self.residual,
                "convention": self.convention,
            }
        )

    @staticmethod
    def from_json(text: str) -> "PhaseFactors":
        d = json.loads(text)
        return PhaseFactors(
            np.asarray(d["phases"], dtype=float),
            d["parity"],
            float(d["residual"]),
            d.get("convention", "wx"),
        )


def chebyshev_phases(degree: int, negate: bool = False) -> PhaseFactors:
    """Phases realizing T_d (all zero) or −T_d (π/2 at both ends)."""
    ph = np.zeros(degree + 1)
    if negate:
        ph[0] = np.pi / 2
        ph[-1] += np.pi / 2
    return PhaseFactors(ph, "even" if degree % 2 == 0 else "odd")


# ---------------------------------------------------------------------------
# Polynomial construction: minimax fit of ½√x on [δ, 1] by linear programming.
# ---------------------------------------------------------------------------


def _cheb_design(x: np.ndarray, degree: int) -> np.ndarray:
    """Columns T_0(x), T_2(x), ..., T_degree(x) (even basis only)."""
    v = np_cheb.chebvander(x, degree)
    return v[:, 0 : degree + 1 : 2]


def _even_coeffs_to_full(c_even: np.ndarray, degree: int) -> np.ndarray:
    full = np.zeros(degree + 1)
    full[0 : degree + 1 : 2] = c_even
    return full


def _cheb_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    k = np.arange(count)
    t = np.cos(np.pi * (2 * k + 1) / (2 * count))
    return (hi + lo) / 2 + (hi - lo) / 2 * t


def _half_sqrt_lp(degree: int, lo_fit: float, eta: float) -> Optional[np.ndarray]:
    """One LP solve: even coefficients of a minimax fit, or None on failure."""
    ncoef = degree // 2 + 1
    x_fit = _cheb_nodes(lo_fit, 1.0, max(6 * ncoef, 90))
    x_bnd = _cheb_nodes(0.0, 1.0, max(10 * ncoef, 240))
    a_fit = _cheb_design(x_fit, degree)
    a_bnd = _cheb_design(x_bnd, degree)
    f = 0.5 * np.sqrt(x_fit)

    ones = np.ones((a_fit.shape[0], 1))
    zeros = np.zeros((a_bnd.shape[0], 1))
    a_ub = np.vstack(
        [
            np.hstack([a_fit, -ones]),
            np.hstack([-a_fit, -ones]),
            np.hstack([a_bnd, zeros]),
            np.hstack([-a_bnd, zeros]),
        ]
    )
    b_ub = np.concatenate(
        [f, -f, np.full(x_bnd.size, _LP_SUP_BOUND), np.full(x_bnd.size, _LP_SUP_BOUND)]
    )
    c_obj = np.zeros(ncoef + 1)
    c_obj[-1] = 1.0
    res = linprog(
        c_obj,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(None, None)] * ncoef + [(0, None)],
        method="highs",
    )
    if not res.success or res.x[-1] > 0.95 * eta:
        return None
    return res.x[:ncoef]


def _degree_ladder() -> list[int]:
    ladder = list(range(2, 41, 2)) + list(range(44, 81, 4))
    ladder += list(range(88, 161, 8)) + list(range(176, MAX_DEGREE + 1, 16))
    return ladder


def approx_half_sqrt(delta: float, eta: float) -> ChebPoly:
    """Even Chebyshev polynomial with ‖P − ½√x‖_[δ,1] ≤ η and ‖P‖_[−1,1] < 1.

    The fit domain extends to 0.8·δ so callers applying P to matrices whose
    spectrum dips slightly below δ stay inside the certified region.  Raises
    if no degree up to 512 meets the target accuracy.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    if not 0.0 < eta <= 0.5:
        raise ValueError("eta must lie in (0, 1/2]")
    lo_fit = _FIT_DOMAIN_MARGIN * delta
    dense_fit = np.linspace(delta, 1.0, 10_000)
    dense_all = np.linspace(-1.0, 1.0, 20_001)
    best_err = np.inf
    for degree in _degree_ladder():
        c_even = _half_sqrt_lp(degree, lo_fit, eta)
        if c_even is None:
            continue
        coeffs = _even_coeffs_to_full(c_even, degree)
        err = float(np.max(np.abs(np_cheb.chebval(dense_fit, coeffs) - 0.5 * np.sqrt(dense_fit))))
        best_err = min(best_err, err)
        if err > eta:
            continue
        if float(np.max(np.abs(np_cheb.chebval(dense_all, coeffs)))) > _QSP_SUP_LIMIT:
            continue
        return ChebPoly(coeffs, "even", degree)
    raise ValueError(
        f"accuracy eta={eta} unreachable at degree cap {MAX_DEGREE}; "
        f"best sup-error achieved {best_err:.3e}"
    )


# ---------------------------------------------------------------------------
# QSP evaluation and the symmetric phase solver.
# ---------------------------------------------------------------------------


def _w_matrices(x: np.ndarray) -> np.ndarray:
    """(M, 2, 2) batch of rotation-convention signal operators W(x)."""
    s = np.sqrt(np.clip(1.0 - x**2, 0.0, None))
    w = np.zeros((x.size, 2, 2), dtype=complex)
    w[:, 0, 0] = x
    w[:, 1, 1] = x
    w[:, 0, 1] = 1j * s
    w[:, 1, 0] = 1j * s
    return w


def _e_matrices(phi: float, count: int) -> np.ndarray:
    e = np.zeros((count, 2, 2), dtype=complex)
    e[:, 0, 0] = np.exp(1j * phi)
    e[:, 1, 1] = np.exp(-1j * phi)
    return e


def _qsp_batch(phases: np.ndarray, x: np.ndarray) -> np.ndarray:
    """U_Φ(x) for a batch of x values, shape (M, 2, 2)."""
    w = _w_matrices(x)
    u = _e_matrices(phases[0], x.size)
    for phi in phases[1:]:
        u = u @ w
        u = u @ _e_matrices(phi, x.size)
    return u


def qsp_eval(phi: PhaseFactors, x: float) -> CMatrix:
    """The 2×2 unitary U_Φ(x) = e^{iφ₀Z} Π_j W(x) e^{iφ_j Z}."""
    if not -1.0 <= x <= 1.0:
        raise ValueError("x must lie in [-1, 1]")
    return _qsp_batch(phi.phases, np.asarray([float(x)]))[0]


def qsp_poly_value(phi: PhaseFactors, x) -> np.ndarray:
    """The realized polynomial Re⟨0|U_Φ(x)|0⟩, vectorized over x."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    return np.real(_qsp_batch(phi.phases, xs)[:, 0, 0])


def _sym_expand(free: np.ndarray, degree: int) -> np.ndarray:
    # symmetric convention: phi_j = phi_{d-j}
    full = np.zeros(degree + 1)
    for j in range(degree + 1):
        full[j] = free[min(j, degree - j)]
    return full


def _residual_and_jac(
    free: np.ndarray, degree: int, xs: np.ndarray, target: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    phases = _sym_expand(free, degree)
    m = xs.size
    w = _w_matrices(xs)
    # prefix[j] = E(φ0) W E(φ1) ... W E(φj); suffix[j] = W E(φ_{j+1}) ... W E(φd)
    prefix = np.zeros((degree + 1, m, 2, 2), dtype=complex)
    prefix[0] = _e_matrices(phases[0], m)
    for j in range(1, degree + 1):
        prefix[j] = prefix[j - 1] @ w @ _e_matrices(phases[j], m)
    suffix = np.zeros((degree + 1, m, 2, 2), dtype=complex)
    suffix[degree] = np.broadcast_to(np.eye(2, dtype=complex), (m, 2, 2)).copy()
    for j in range(degree - 1, -1, -1):
        suffix[j] = w @ _e_matrices(phases[j + 1], m) @ suffix[j + 1]
    top = prefix[degree][:, 0, 0]
    res = np.real(top) - target
    # d⟨0|U|0⟩/dφ_j = (prefix[j] · iZ · suffix[j])[0,0]
    jac_full = np.empty((m, degree + 1))
    for j in range(degree + 1):
        val = 1j * (
            prefix[j][:, 0, 0] * suffix[j][:, 0, 0]
            - prefix[j][:, 0, 1] * suffix[j][:, 1, 0]
        )
        jac_full[:, j] = np.real(val)
    half = (degree + 2) // 2
    jac = np.zeros((m, half))
    for j in range(degree + 1):
        jac[:, min(j, degree - j)] += jac_full[:, j]
    return res, jac


def _is_pure_chebyshev(p: ChebPoly) -> Optional[float]:
    """If p = s·T_d with |s| = 1 (within 1e-14), return s."""
    c = p.coeffs
    if abs(abs(c[-1]) - 1.0) > 1e-14:
        return None
    if np.any(np.abs(c[:-1]) > 1e-14):
        return None
    return float(np.sign(c[-1]))


def solve_phases(p: ChebPoly, max_restarts: int = 10) -> PhaseFactors:
    """Symmetric phases with Re⟨0|U_Φ(x)|0⟩ = p(x) to ≤ 1e−8 on a dense grid.

    Quasi-Newton least squares (Levenberg–Marquardt with an analytic Jacobian)
    from the (π/4, 0, …, 0, π/4) seed, with seeded random restarts.  Targets
    must have definite parity and sup-norm at most 1 (≤ 1−1e−6 for guaranteed
    convergence); rescale first if needed.
    """
    if p.parity not in ("even", "odd"):
        raise ValueError("solve_phases needs a definite-parity polynomial")
    degree = p.degree
    if p.parity != ("even" if degree % 2 == 0 else "odd"):
        raise ValueError("parity does not match the polynomial degree")
    sup = p.sup_norm()
    if sup > 1.0 + 1e-12:
        raise ValueError(f"sup-norm {sup} exceeds 1; rescale the polynomial first")

    sign = _is_pure_chebyshev(p)
    if sign is not None:
        phi = chebyshev_phases(degree, negate=sign < 0)
        return PhaseFactors(phi.phases, phi.parity, residual=_dense_residual(phi, p))

    nfree = (degree + 2) // 2
    m = max(degree + 1, nfree + 8)
    xs = np.cos(np.pi * (2 * np.arange(m) + 1) / (4 * m))  # nodes in (0, 1)
    target = np.asarray(p(xs), dtype=float)

    seed_free = np.zeros(nfree)
    seed_free[0] = np.pi / 4
    rng = np.random.default_rng(271828)
    best: tuple[float, np.ndarray] | None = None
    for restart in range(max_restarts):
        x0 = seed_free if restart == 0 else seed_free + 0.3 * rng.standard_normal(nfree)
        sol = least_squares(
            lambda v: _residual_and_jac(v, degree, xs, target)[0],
            x0,
            jac=lambda v: _residual_and_jac(v, degree, xs, target)[1],
            method="lm",
            xtol=2.3e-16,
            ftol=2.3e-16,
            gtol=2.3e-16,
            max_nfev=400 * nfree,
        )
        phases = _sym_expand(sol.x, degree)
        phi = PhaseFactors(phases, p.parity)
        res = _dense_residual(phi, p)
        if best is None or res < best[0]:
            best = (res, phases)
        if res <= 5e-9:
            return PhaseFactors(phases, p.parity, residual=res)
    assert best is not None
    if best[0] <= 1e-8:
        return PhaseFactors(best[1], p.parity, residual=best[0])
    raise RuntimeError(
        f"phase solver did not converge after {max_restarts} restarts; "
        f"best residual {best[0]:.3e}"
    )


def _dense_residual(phi: PhaseFactors, p: ChebPoly) -> float:
    grid = np.cos(np.pi * np.arange(401) / 400)
    return float(np.max(np.abs(qsp_poly_value(phi, grid) - p(grid))))


# ---------------------------------------------------------------------------
# QSVT: apply a QSP polynomial to the singular values of a block encoding.
# ---------------------------------------------------------------------------


def _reflection_phases(rot_phases: np.ndarray) -> tuple[np.ndarray, complex]:
    """Convert wx-convention phases to reflection-convention phases.

    U_rot,Φ = i^d · e^{i(φ₀−π/4)Z} W_refl e^{i(φ₁−π/2)Z} ⋯ W_refl e^{i(φ_d−π/4)Z}.
    """
    d = rot_phases.size - 1
    refl = np.array(rot_phases, dtype=float)
    refl[0] -= np.pi / 4
    refl[-1] -= np.pi / 4
    if d >= 2:
        refl[1:-1] -= np.pi / 2
    return refl, 1j**d


def _qsvt_product(
    u: CMatrix,
    block_dim: int,
    rot_phases: np.ndarray,
    on_query: Optional[Callable[[], None]] = None,
) -> CMatrix:
    """Dense product R'₀ U R'₁ U† R'₂ ⋯ (alternating), including the i^d phase.

    ``block_dim`` is the dimension of the ⟨0^a| block; the projector-controlled
    phase e^{iφ(2Π−I)} multiplies the first ``block_dim`` rows/columns by e^{iφ}
    and the rest by e^{−iφ}.  ``on_query`` fires once per U/U† application.
    """
    refl, gphase = _reflection_phases(rot_phases)
    dim = u.shape[0]
    d = refl.size - 1

    def phase_vec(phi: float) -> np.ndarray:
        v = np.full(dim, np.exp(-1j * phi), dtype=complex)
        v[:block_dim] = np.exp(1j * phi)
        return v

    udag = u.conj().T
    out = None
    for j in range(1, d + 1):
        # the rightmost (first-applied) signal factor is always U, so even
        # degrees transform the right singular basis (polynomials in M†M)
        factor = u if (d - j) % 2 == 0 else udag
        if on_query is not None:
            on_query()
        if out is None:
            out = phase_vec(refl[0])[:, None] * factor
        else:
            out = out @ factor
        out = out * phase_vec(refl[j])[None, :]
    if out is None:  # degree 0
        out = np.diag(phase_vec(refl[0]))
    return gphase * out


def qsvt_apply(phi: PhaseFactors, be: BlockEncoding) -> BlockEncoding:
    """Apply the solved polynomial to the singular values of be's block.

    Returns an encoding with one extra ancilla whose block is the real target
    polynomial applied to the block's singular values — W·P(Σ)·V† for odd
    parity, V·P(Σ)·V† for even — which for Hermitian blocks is the spectral
    application P(M).  The ±Φ sequences are averaged via a Hadamard-conjugated
    select on the new qubit to extract the real part.
    """
    d = phi.degree
    if phi.parity != ("even" if d % 2 == 0 else "odd"):
        raise ValueError("phase parity does not match the sequence length")
    enc = normalize_selectors(be)
    block_dim = 2**enc.n
    seq_plus = _qsvt_product(enc.u, block_dim, phi.phases)
    if np.all(np.abs(phi.phases) < 1e-15):
        u_out = kron(np.eye(2), seq_plus)
    else:
        seq_minus = _qsvt_product(enc.u, block_dim, -phi.phases)
        dim = seq_plus.shape[0]
        select = np.zeros((2 * dim, 2 * dim), dtype=complex)
        select[:dim, :dim] = seq_plus
        select[dim:, dim:] = seq_minus
        had = kron(HADAMARD, np.eye(dim))
        u_out = had @ select @ had
    return BlockEncoding(u_out, enc.a + 1, enc.n, 1.0, enc.eps + phi.residual)
