"""Coin states, dense statevectors and the symmetric-subspace basis.

Bit order: basis index ``k`` has qubit ``q`` (1-based) at bit ``q - 1``, so
qubit 1, the output qubit, is the least significant bit. Coins of variable 1
occupy the lowest bits, then variable 2, ..., and ancillas the highest bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, sqrt
from typing import Sequence

import numpy as np

from .errors import DomainError
from .poly import is_inf
from .policy import current_policy


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise DomainError(f"{amps.shape[0]} amplitudes for {self.num_qubits} qubits")
        norm2 = float(np.vdot(amps, amps).real)
        if norm2 != 0.0 and abs(norm2 - 1.0) > 1e-10:
            raise DomainError(f"state norm^2 {norm2} is neither 0 nor 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def __array__(self, dtype=None, copy=None):
        return self.amps if dtype is None else self.amps.astype(dtype)

    def __len__(self):
        return self.amps.shape[0]

    def to_json(self) -> dict:
        return {"num_qubits": self.num_qubits, "amps": [[a.real, a.imag] for a in self.amps]}

    @classmethod
    def from_json(cls, data) -> "StateVector":
        return cls(int(data["num_qubits"]), np.array([complex(*a) for a in data["amps"]]))


def _guard(num_qubits: int):
    if num_qubits > current_policy().max_qubits:
        raise DomainError(f"{num_qubits} qubits exceeds the dense-simulation limit")


def coin_amplitudes(z) -> tuple[complex, complex]:
    """``(amp on |0>, amp on |1>)`` of ``(z|0> + |1>)/sqrt(1+|z|^2)``; infinity is ``|0>``."""
    if is_inf(z):
        return 1 + 0j, 0j
    z = complex(z)
    norm = sqrt(1.0 + abs(z) ** 2)
    return z / norm, 1 / norm


@lru_cache(maxsize=None)
def _symmetric(n: int, j: int) -> np.ndarray:
    idx = np.arange(2**n)
    ones = np.array([bin(i).count("1") for i in idx])
    vec = np.where(n - ones == j, 1.0, 0.0).astype(complex)
    vec /= sqrt(comb(n, j))
    vec.setflags(write=False)
    return vec


def symmetric_basis_vector(n: int, j: int) -> StateVector:
    """Equal superposition of the ``C(n, j)`` bitstrings with exactly ``j`` zeros."""
    if not 0 <= j <= n:
        raise DomainError(f"j={j} outside [0, {n}]")
    _guard(n)
    return StateVector(n, _symmetric(n, j))


def symmetric_product_basis(ns: Sequence[int], m: int = 0) -> tuple[np.ndarray, list]:
    """Columns ``|0>^m (x) |s_{j_k}> (x) ... (x) |s_{j_1}>`` for every multi-index.

    Returns the ``2^(sum ns + m) x prod(n+1)`` matrix and the multi-indices in
    C order, matching ``np.ndindex(*(n + 1 for n in ns))``.
    """
    _guard(sum(ns) + m)
    index_list = list(np.ndindex(*[n + 1 for n in ns]))
    anc = np.zeros(2**m, dtype=complex)
    anc[0] = 1.0
    cols = []
    for J in index_list:
        v = np.ones(1, dtype=complex)
        for n, j in zip(ns, J):
            v = np.kron(_symmetric(n, j), v)
        cols.append(np.kron(anc, v))
    return np.array(cols).T, index_list


def input_state(zs: Sequence, ns: Sequence[int], m: int = 0) -> StateVector:
    """``|0>^m (x) |z_k>^n_k (x) ... (x) |z_1>^n_1`` with variable 1 in the low bits."""
    if len(zs) == 0:
        raise DomainError("at least one variable is required")
    if len(zs) != len(ns):
        raise DomainError(f"{len(zs)} values for {len(ns)} variables")
    if any(n < 0 for n in ns) or m < 0:
        raise DomainError("qubit counts must be non-negative")
    total = sum(ns) + m
    _guard(total)
    v = np.ones(1, dtype=complex)
    for z, n in zip(zs, ns):
        coin = np.array(coin_amplitudes(z))
        for _ in range(n):
            v = np.kron(coin, v)
    anc = np.zeros(2**m, dtype=complex)
    anc[0] = 1.0
    return StateVector(total, np.kron(anc, v))


def fidelity_to_coin(v, z) -> float:
    """``|<z|v>|^2`` for a normalized single-qubit state ``v``."""
    amps = np.asarray(v, dtype=complex).reshape(-1)
    if amps.shape[0] != 2:
        raise DomainError("fidelity_to_coin expects a single-qubit state")
    if abs(np.vdot(amps, amps).real - 1.0) > 1e-9:
        raise DomainError("state is not normalized")
    target = np.array(coin_amplitudes(z))
    return float(min(1.0, abs(np.vdot(target, amps)) ** 2))
