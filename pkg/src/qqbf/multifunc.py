"""Two-output circuits: compatibility test, priority construction and dilation.

Branch 0 heralds every qubit but the output on 0 and yields ``g0``; branch 1
sets qubit 2 to 1 (basis indices 2 and 3) and yields ``g1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CompatibilityError, DomainError, NumericError
from .policy import current_policy
from .states import StateVector, symmetric_product_basis
from .synth import (
    abc,
    build_v0_v1,
    check_register,
    complete_unitary,
    inverse_binomials,
    matrix_to_json,
    needs_ancilla,
    residual_vectors,
    solve_xyk,
)


def _register(g0, g1, n) -> tuple:
    if g0.k != g1.k:
        raise DomainError(f"g0 has {g0.k} variables, g1 has {g1.k}")
    ns = (int(n),) * g0.k if np.isscalar(n) else tuple(int(v) for v in n)
    check_register(g0, ns)
    check_register(g1, ns)
    return ns


def _c(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class CompatibilityReport:
    s1: complex
    s2: complex
    compatible: bool
    limit_verdict: bool | None = None
    epsilon_trace: tuple = ()
    residuals: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "compatible": self.compatible,
            "s1": _c(self.s1),
            "s2": _c(self.s2),
            "limit_verdict": self.limit_verdict,
            "epsilon_trace": [[e, _c(a), _c(b)] for e, a, b in self.epsilon_trace],
            "residuals": {k: _c(v) for k, v in self.residuals.items()},
        }


def _inner(A, B, w) -> complex:
    """``sum_J A_J conj(B_J) / C_J``."""
    return complex(np.sum(A * np.conj(B) * w))


def _s_values(P, Q, R, S, w, x, y) -> tuple[complex, complex]:
    s1 = np.sum((np.conj(P) / x - np.conj(Q) / y) * R * w)
    s2 = np.sum((np.conj(P) / x - np.conj(Q) / y) * S * w)
    return complex(s1), complex(s2)


def _tends_to_zero(vals: Sequence[float], tiny: float, ratio: float) -> bool:
    if max(vals) <= tiny:
        return True
    dec = all(b <= a for a, b in zip(vals, vals[1:]))
    return dec and vals[-1] < ratio * vals[0]


def compatibility(g0, g1, n) -> CompatibilityReport:
    """Can ``g1`` ride on branch 1 without costing ``g0`` any probability?

    The verdict comes from the exact orthogonality conditions, with the
    vanishing-``x`` and vanishing-``y`` cases solved directly. When ``x`` or
    ``y`` is zero the perturbation ladder ``P -> P + eps`` is also evaluated
    and its own verdict reported as ``limit_verdict``.
    """
    ns = _register(g0, g1, n)
    pol = current_policy()
    P, Q = g0.dense(ns)
    R, S = g1.dense(ns)
    w = inverse_binomials(ns)
    # the conditions are homogeneous in g1, so judge them at unit norm
    g1_norm = math.sqrt(float(np.sum((np.abs(R) ** 2 + np.abs(S) ** 2) * w)))
    Rn, Sn = R / g1_norm, S / g1_norm
    sc = solve_xyk(*abc(g0, ns))
    x, y = sc.x, sc.y
    pr, ps, qr, qs = _inner(P, Rn, w), _inner(P, Sn, w), _inner(Q, Rn, w), _inner(Q, Sn, w)
    tol = pol.compat_tol * math.sqrt(sc.a + sc.b)
    if x > 0 and y != 0:
        # a1 from the x-equation must also satisfy the y-equation
        residuals = {"r": pr / x - qr / np.conj(y), "s": ps / x - qs / np.conj(y)}
    elif x > 0:
        residuals = {"qr": qr, "qs": qs}
    elif y != 0:
        residuals = {"pr": pr, "ps": ps}
    else:
        residuals = {"pr": pr, "ps": ps, "qr": qr, "qs": qs}
    compatible = all(abs(v) <= tol for v in residuals.values())

    if x > pol.zero_tol and abs(y) > pol.zero_tol:
        s1, s2 = _s_values(P, Q, R, S, w, x, y)
        return CompatibilityReport(s1, s2, compatible, None, (), residuals)

    trace = []
    for eps in pol.eps_ladder:
        Pe = P.copy()
        Pe.flat[0] += eps
        a = float(np.sum(np.abs(Q) ** 2 * w))
        b = float(np.sum(np.abs(Pe) ** 2 * w))
        c = _inner(Pe, Q, w)
        se = solve_xyk(a, b, c)
        if se.x == 0 or se.y == 0:
            trace.append((eps, complex("nan"), complex("nan")))
            continue
        trace.append((eps, *_s_values(Pe, Q, R, S, w, se.x, se.y)))
    good = [t for t in trace if not (np.isnan(t[1]) or np.isnan(t[2]))]
    limit = None
    if len(good) >= 2:
        limit = all(
            _tends_to_zero([abs(t[i]) for t in good], pol.compat_tol, pol.limit_ratio) for i in (1, 2)
        )
    s1, s2 = (good[-1][1], good[-1][2]) if good else (complex("nan"), complex("nan"))
    return CompatibilityReport(s1, s2, compatible, limit, tuple(trace), residuals)


@dataclass(frozen=True, eq=False)
class MultifunctionalCircuit:
    g0: object
    g1: object
    ns: tuple
    m: int
    U: np.ndarray
    rows: tuple
    method: str
    scalars: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.ns)

    @property
    def num_qubits(self) -> int:
        return sum(self.ns) + self.m

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "ns": list(self.ns),
            "m": self.m,
            "unitary": matrix_to_json(self.U),
            "scalars": {k: _c(v) if isinstance(v, complex) else v for k, v in self.scalars.items()},
            "bit_order": "lsb-first",
            "g0": self.g0.to_json(),
            "g1": self.g1.to_json(),
        }


def _priority_m(ns, m_synth: int) -> int:
    nt = sum(ns)
    need = math.prod(n + 1 for n in ns) + 2
    m = 0
    while 2 ** (nt + m) < need or nt + m < 2:
        m += 1
    return max(m, m_synth)


def _solve_a2_a4(A2: float, B2: float, C2: complex, tiny: float) -> tuple[float, complex]:
    if abs(C2) <= tiny:
        C2 = 0j
    d = B2 - A2
    root = math.sqrt(d * d + 4 * abs(C2) ** 2)
    # pick the cancellation-free form of the positive root
    a2sq = (d + root) / 2 if d >= 0 else 2 * abs(C2) ** 2 / (root - d)
    a2 = math.sqrt(max(a2sq, 0.0))
    if a2 > 0:
        return a2, -C2 / a2
    if C2 != 0:
        raise NumericError("a2 vanishes while the cross term does not")
    return 0.0, complex(math.sqrt(max(A2 - B2, 0.0)))


def synthesize_priority(g0, g1, n) -> MultifunctionalCircuit:
    """Keep ``g0``'s optimal probability and put ``g1`` on the second herald pattern."""
    ns = _register(g0, g1, n)
    rep = compatibility(g0, g1, ns)
    if not rep.compatible:
        raise CompatibilityError(f"g1 is not compatible with g0 (residuals {rep.residuals})")
    pol = current_policy()
    sc = solve_xyk(*abc(g0, ns))
    m = _priority_m(ns, 1 if needs_ancilla(ns, sc.x, sc.y) else 0)
    v0, v1, th0 = build_v0_v1(g0, ns, m, sc)
    Sb, index_list = symmetric_product_basis(ns, m)
    dim = Sb.shape[0]
    if th0 is None:
        th0_vec = residual_vectors(Sb, 1, dim)[0]
    else:
        th0_vec = th0.amps
    th1 = residual_vectors(np.column_stack([Sb, th0_vec]), 1, dim)[0]

    R, S = g1.dense(ns)
    P, Q = g0.dense(ns)
    w = inverse_binomials(ns)
    x, y = sc.x, sc.y
    pr, ps, qr, qs = _inner(P, R, w), _inner(P, S, w), _inner(Q, R, w), _inner(Q, S, w)
    if x > 0:
        a1, a3 = -pr / x, -ps / x
    elif y != 0:
        a1, a3 = -qr / np.conj(y), -qs / np.conj(y)
    else:
        a1 = a3 = 0j
    a1, a3 = complex(a1), complex(a3)
    A2 = float(np.sum(np.abs(R) ** 2 * w)) + abs(a1) ** 2
    B2 = float(np.sum(np.abs(S) ** 2 * w)) + abs(a3) ** 2
    C2 = _inner(R, S, w) + np.conj(a1) * a3
    a2, a4 = _solve_a2_a4(A2, B2, C2, pol.zero_tol * (A2 + B2))
    H = 1.0 / math.sqrt(A2 + a2 * a2)

    sqw = np.sqrt(np.array([w[J] for J in index_list]))
    base_r = Sb @ (np.conj(np.array([R[J] for J in index_list])) * sqw)
    base_s = Sb @ (np.conj(np.array([S[J] for J in index_list])) * sqw)
    nq = sum(ns) + m
    v2 = StateVector(nq, H * (base_r + a1 * th0_vec + a2 * th1))
    v3 = StateVector(nq, H * (base_s + a3 * th0_vec + a4 * th1))
    U = complete_unitary([v0, v1, v2, v3])
    scalars = {"x": sc.x, "y": sc.y, "K": sc.K, "a1": a1, "a2": a2, "a3": a3, "a4": a4, "a5": 0.0, "H": H}
    return MultifunctionalCircuit(g0, g1, ns, m, U, (v0, v1, v2, v3), "priority", scalars)


def _psd_sqrt(M: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((M + M.conj().T) / 2)
    if vals.min(initial=0.0) < -1e-12:
        raise DomainError("matrix is not positive semidefinite")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def dilation_unitary(A) -> np.ndarray:
    """Unitary ``[[A, sqrt(I - AA')], [sqrt(I - A'A), -A']]`` containing contraction ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if A.ndim != 2:
        raise DomainError("contraction must be a matrix")
    norm = np.linalg.norm(A, 2) if A.size else 0.0
    if norm > 1 + current_policy().contraction_tol:
        raise DomainError(f"spectral norm {norm} exceeds 1")
    N, M = A.shape
    Ah = A.conj().T
    top = np.hstack([A, _psd_sqrt(np.eye(N) - A @ Ah)])
    bottom = np.hstack([_psd_sqrt(np.eye(M) - Ah @ A), -Ah])
    return np.vstack([top, bottom])


def synthesize_dilation(g0, g1, n, r: float = 1.0) -> MultifunctionalCircuit:
    """Any pair via the dilation of the scaled coefficient matrix.

    Rows 0..3 of the contraction hold ``p, q, r, s`` weighted by
    ``1/sqrt(C_J)``. The symmetric subspace is rotated onto the columns of
    ``A`` inside the dilation, and the whole thing lives in the smallest qubit space that
    fits the dilation.
    """
    ns = _register(g0, g1, n)
    if not r >= 1:
        raise DomainError("r must be >= 1")
    P, Q = g0.dense(ns)
    R, S = g1.dense(ns)
    w = inverse_binomials(ns)
    index_list = list(np.ndindex(*[v + 1 for v in ns]))
    sqw = np.sqrt(np.array([w[J] for J in index_list]))
    Mx = np.array([[X[J] for J in index_list] for X in (P, Q, R, S)]) * sqw
    A = Mx / (r * np.linalg.norm(Mx, 2))
    Ud = dilation_unitary(A)
    D = len(index_list)
    nt = sum(ns)
    m = 0
    while 2 ** (nt + m) < D + 4:
        m += 1
    Sb, _ = symmetric_product_basis(ns, m)
    dim = Sb.shape[0]
    # V sends |S_J> to e_J, the column block that A acts on
    V = complete_unitary(list(Sb.T))
    big = np.eye(dim, dtype=complex)
    big[: D + 4, : D + 4] = Ud
    W = big @ V
    nq = nt + m
    rows = tuple(StateVector(nq, W[i].conj()) for i in range(4))
    scalars = {"r": float(r), "spectral_norm": float(np.linalg.norm(Mx, 2))}
    return MultifunctionalCircuit(g0, g1, ns, m, W, rows, "dilation", scalars)
