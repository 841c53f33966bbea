"""Optimal QQBF circuit synthesis.

Given ``f = P/Q`` and a coin budget ``ns``, the first two rows of the circuit
unitary are fixed to

    v0 = K * sum_J conj(p_J)/sqrt(C_J) |S_J> + K x |theta0>
    v1 = K * sum_J conj(q_J)/sqrt(C_J) |S_J> + K y |theta0>

where ``|S_J>`` are the symmetric product states and ``C_J`` the product of
binomials. The remaining rows come from a Householder completion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapacityError, DomainError
from .policy import current_policy
from .poly import fn_from_json
from .states import StateVector, symmetric_product_basis


@dataclass(frozen=True)
class SynthScalars:
    a: float
    b: float
    c: complex
    l: float
    x: float
    y: complex
    K: float
    w: float = 0.0

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": [self.c.real, self.c.imag],
            "l": self.l,
            "x": self.x,
            "y": [self.y.real, self.y.imag],
            "K": self.K,
            "w": self.w,
        }


@dataclass(frozen=True, eq=False)
class QQBFCircuit:
    fn: object
    ns: tuple
    m: int
    U: np.ndarray
    v0: StateVector
    v1: StateVector
    theta0: StateVector | None
    scalars: SynthScalars | None = None
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.ns)

    @property
    def num_qubits(self) -> int:
        return sum(self.ns) + self.m

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "ns": list(self.ns),
            "m": self.m,
            "unitary": matrix_to_json(self.U),
            "scalars": self.scalars.to_json() if self.scalars else None,
            "theta0": None if self.theta0 is None else [[a.real, a.imag] for a in self.theta0.amps],
            "bit_order": "lsb-first",
            "fn": self.fn.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "QQBFCircuit":
        allowed = {"k", "ns", "m", "unitary", "scalars", "theta0", "bit_order", "fn"}
        extra = set(data) - allowed
        if extra:
            raise DomainError(f"unknown circuit fields: {sorted(extra)}")
        if data.get("bit_order", "lsb-first") != "lsb-first":
            raise DomainError("only lsb-first bit order is supported")
        ns = tuple(int(n) for n in data["ns"])
        m = int(data["m"])
        if "k" in data and int(data["k"]) != len(ns):
            raise DomainError("k disagrees with ns")
        U = matrix_from_json(data["unitary"])
        nq = sum(ns) + m
        if U.shape != (2**nq, 2**nq):
            raise DomainError(f"unitary shape {U.shape} does not match {nq} qubits")
        _check_unitary(U)
        theta = data.get("theta0")
        theta0 = None if theta is None else StateVector(nq, np.array([complex(*t) for t in theta]))
        s = data.get("scalars")
        scalars = None
        if s:
            scalars = SynthScalars(
                s["a"], s["b"], complex(*s["c"]), s["l"], s["x"], complex(*s["y"]), s["K"], s.get("w", 0.0)
            )
        return cls(
            fn=fn_from_json(data["fn"]),
            ns=ns,
            m=m,
            U=U,
            v0=StateVector(nq, U[0].conj()),
            v1=StateVector(nq, U[1].conj()),
            theta0=theta0,
            scalars=scalars,
        )


def matrix_to_json(U) -> list:
    return [[[z.real, z.imag] for z in row] for row in np.asarray(U, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    try:
        return np.array([[complex(float(z[0]), float(z[1])) for z in row] for row in rows], dtype=complex)
    except (TypeError, IndexError, ValueError) as exc:
        raise DomainError(f"malformed complex matrix: {exc}") from None


def _check_unitary(U, tol=None):
    tol = current_policy().orth_tol if tol is None else tol
    err = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]))
    if err > tol:
        raise DomainError(f"matrix is not unitary (|U'U - I|_F = {err:.3e})")


def inverse_binomials(ns: Sequence[int]) -> np.ndarray:
    """Tensor ``1 / prod_i C(n_i, j_i)`` over all multi-indices."""
    w = np.ones(())
    for n in ns:
        w = np.multiply.outer(w, np.array([1.0 / math.comb(n, j) for j in range(n + 1)]))
    return w


def check_register(f, ns) -> tuple:
    ns = tuple(int(n) for n in ns)
    if len(ns) != f.k:
        raise DomainError(f"{len(ns)} coin counts for a {f.k}-variable function")
    for i, (n, d) in enumerate(zip(ns, f.degrees)):
        if n < d:
            raise DomainError(f"variable {i + 1}: {n} coins below degree {d}")
    return ns


def abc(f, ns: Sequence[int]) -> tuple[float, float, complex]:
    ns = check_register(f, ns)
    P, Q = f.dense(ns)
    w = inverse_binomials(ns)
    a = float(np.sum(np.abs(Q) ** 2 * w))
    b = float(np.sum(np.abs(P) ** 2 * w))
    c = complex(np.sum(P * Q.conj() * w))
    return a, b, c


def solve_xyk(a: float, b: float, c: complex, w: float = 0.0) -> SynthScalars:
    if a <= 0 and b <= 0:
        raise DomainError("both polynomials vanish")
    c = complex(c)
    d = w * w + a - b
    l = math.sqrt(d * d + 4 * abs(c) ** 2)
    zt = current_policy().zero_tol * (a + b + w * w)
    if abs(c) <= zt:
        # c is roundoff; x and y come from the sign of d alone
        if abs(d) <= zt:
            x, ymag = 0.0, 0.0
        else:
            x, ymag = math.sqrt(max(d, 0.0)), math.sqrt(max(-d, 0.0))
        phase = 1.0
    else:
        # the larger root is stable, the smaller one follows from x |y| = |c|
        if d >= 0:
            xsq = (l + d) / 2
            ysq = abs(c) ** 2 / xsq
        else:
            ysq = (l - d) / 2
            xsq = abs(c) ** 2 / ysq
        x, ymag = math.sqrt(xsq), math.sqrt(ysq)
        phase = -c / abs(c)
    K = math.sqrt(2.0 / (l + w * w + a + b))
    return SynthScalars(a=a, b=b, c=c, l=l, x=x, y=complex(phase * ymag), K=K, w=w)


def needs_ancilla(ns: Sequence[int], x: float, y: complex) -> bool:
    nt = sum(ns)
    if nt == 0:
        return True
    if 2**nt > math.prod(n + 1 for n in ns):
        return False
    return not (x == 0 and y == 0)


def residual_vectors(basis: np.ndarray, count: int, dim: int) -> list:
    """First ``count`` normalized residuals of ``e_0, e_1, ...`` against ``basis`` columns."""
    found = []
    B = basis
    for idx in range(dim):
        if len(found) == count:
            break
        r = np.zeros(dim, dtype=complex)
        r[idx] = 1.0
        for _ in range(2):
            if B.shape[1]:
                r = r - B @ (B.conj().T @ r)
        nrm = np.linalg.norm(r)
        if nrm > 1e-10:
            r = r / nrm
            found.append(r)
            B = np.column_stack([B, r])
    if len(found) < count:
        raise CapacityError(f"only {len(found)} of {count} orthogonal directions fit in dimension {dim}")
    return found


def theta0(ns: Sequence[int], m: int) -> StateVector:
    """Deterministic unit vector orthogonal to every symmetric product state.

    With an ancilla this is the basis state with the first ancilla set and
    everything else zero; otherwise the first residual of the computational
    basis after projecting out the symmetric span.
    """
    nt = sum(ns)
    dim = 2 ** (nt + m)
    if m >= 1:
        v = np.zeros(dim, dtype=complex)
        v[2**nt] = 1.0
        return StateVector(nt + m, v)
    S, _ = symmetric_product_basis(ns, m)
    return StateVector(nt, residual_vectors(S, 1, dim)[0])


def _coefficient_vector(S, index_list, coeffs, ns) -> np.ndarray:
    w = inverse_binomials(ns)
    amps = np.array([np.conj(coeffs[J]) * math.sqrt(w[J]) for J in index_list])
    return S @ amps


def build_v0_v1(f, ns: Sequence[int], m: int, scalars: SynthScalars | None = None):
    """The two heralded rows as kets, plus the auxiliary direction used (or ``None``)."""
    ns = check_register(f, ns)
    if scalars is None:
        scalars = solve_xyk(*abc(f, ns))
    S, index_list = symmetric_product_basis(ns, m)
    P, Q = f.dense(ns)
    K = scalars.K
    v0 = K * _coefficient_vector(S, index_list, P, ns)
    v1 = K * _coefficient_vector(S, index_list, Q, ns)
    th = None
    if scalars.x != 0 or scalars.y != 0 or scalars.w != 0:
        th = theta0(ns, m)
        v0 = v0 + K * scalars.x * th.amps
        v1 = v1 + K * scalars.y * th.amps
        if scalars.w != 0:
            basis = np.column_stack([S, th.amps])
            th1 = residual_vectors(basis, 1, S.shape[0])[0]
            v1 = v1 + K * scalars.w * th1
    nq = sum(ns) + m
    return StateVector(nq, v0), StateVector(nq, v1), th


def complete_unitary(rows: Sequence) -> np.ndarray:
    """Unitary whose first rows are ``<rows[0]|, <rows[1]|, ...``.

    Householder completion: reflect each vector onto ``e_i`` in turn, then
    undo the phases. A vanishing pivot takes ``alpha = -1``, the limit of
    ``-x/|x|`` from the positive reals.
    """
    V = [np.asarray(r, dtype=complex).reshape(-1) for r in rows]
    if not V:
        raise DomainError("no rows to complete")
    dim = V[0].shape[0]
    if len(V) > dim or any(v.shape[0] != dim for v in V):
        raise DomainError("rows must share a dimension no smaller than their count")
    G = np.array([[np.vdot(a, b) for b in V] for a in V])
    if np.abs(G - np.eye(len(V))).max() > current_policy().orth_tol:
        raise DomainError("rows are not orthonormal")

    us, alphas = [], []

    def reflect(vec):
        for u in us:
            vec = vec - u * (2 * np.vdot(u, vec))
        return vec

    for i, v in enumerate(V):
        x = reflect(v.copy())
        pivot = x[i]
        alpha = -pivot / abs(pivot) if abs(pivot) > 1e-14 else -1.0 + 0j
        u = x.copy()
        u[i] -= alpha
        us.append(u / np.linalg.norm(u))
        alphas.append(alpha)

    # U' = Q_0 Q_1 ... Q_{r-1} diag(alpha); apply to the identity from the right end
    Up = np.eye(dim, dtype=complex)
    Up[:, : len(alphas)] *= np.array(alphas)
    for u in reversed(us):
        Up = Up - np.outer(u, 2 * (u.conj() @ Up))
    return np.ascontiguousarray(Up.conj().T)


def synthesize(f, ns: Sequence[int] | None = None, m: int | None = None) -> QQBFCircuit:
    """Optimal circuit for ``f``; ``ns`` defaults to the per-variable degrees.

    ``m`` may raise the ancilla count above the minimum, never lower it.
    """
    ns = check_register(f, f.degrees if ns is None else ns)
    scalars = solve_xyk(*abc(f, ns))
    m_req = 1 if needs_ancilla(ns, scalars.x, scalars.y) else 0
    if m is None:
        m = m_req
    elif m < m_req:
        raise DomainError(f"this function needs {m_req} ancilla(s), got m={m}")
    v0, v1, th = build_v0_v1(f, ns, m, scalars)
    U = complete_unitary([v0, v1])
    return QQBFCircuit(fn=f, ns=ns, m=m, U=U, v0=v0, v1=v1, theta0=th, scalars=scalars)
