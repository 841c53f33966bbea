"""Dense statevector execution with exact post-selection, sampling and verification."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, VerificationError
from .policy import current_policy
from .poly import is_inf
from .states import fidelity_to_coin, input_state


@dataclass(frozen=True)
class SimulationResult:
    success_prob: float
    output: np.ndarray | None
    fidelity: float
    herald_amps: tuple = ()

    def to_json(self) -> dict:
        out = None if self.output is None else [[a.real, a.imag] for a in self.output]
        fid = None if math.isnan(self.fidelity) else self.fidelity
        return {"success_prob": self.success_prob, "output": out, "fidelity": fid}


@dataclass(frozen=True)
class SampleResult:
    shots: int
    herald_successes: int
    outcome_counts: dict
    rng_seed: int
    branch_counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "shots": self.shots,
            "herald_successes": self.herald_successes,
            "outcome_counts": self.outcome_counts,
            "branch_counts": self.branch_counts,
            "seed": self.rng_seed,
        }


def apply_unitary(psi: np.ndarray, num_qubits: int, U: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply ``U`` to the qubits at bit positions ``targets`` (``targets[0]`` is U's low bit)."""
    k = len(targets)
    if U.shape != (2**k, 2**k):
        raise DomainError(f"{U.shape} unitary on {k} qubits")
    n = num_qubits
    psi_t = np.asarray(psi, dtype=complex).reshape([2] * n)
    U_t = U.reshape([2] * (2 * k))
    # C-order reshape puts bit b on axis n-1-b; U's local bit i sits on axis k-1-i
    in_axes = [k + (k - 1 - i) for i in range(k)]
    psi_axes = [n - 1 - t for t in targets]
    out = np.tensordot(U_t, psi_t, axes=(in_axes, psi_axes))
    dest = [n - 1 - targets[k - 1 - a] for a in range(k)]
    return np.moveaxis(out, list(range(k)), dest).reshape(-1)


def _branch(psi, i0, fn, zs) -> SimulationResult:
    amp0, amp1 = complex(psi[i0]), complex(psi[i0 + 1])
    prob = abs(amp0) ** 2 + abs(amp1) ** 2
    if prob <= 0.0:
        return SimulationResult(0.0, None, float("nan"), (amp0, amp1))
    out = np.array([amp0, amp1]) / math.sqrt(prob)
    fid = float("nan")
    if fn is not None and prob > current_policy().branch_threshold:
        target = fn.value(list(zs))
        if not cmath.isnan(target):
            fid = fidelity_to_coin(out, target)
    return SimulationResult(float(prob), out, fid, (amp0, amp1))


def _evolve(c, zs) -> np.ndarray:
    if len(zs) != len(c.ns):
        raise DomainError(f"circuit takes {len(c.ns)} variables, got {len(zs)}")
    psi = input_state(list(zs), c.ns, c.m).amps
    return c.U @ psi


def run(c, zs: Sequence) -> SimulationResult:
    """Post-select every qubit but the output on 0 and report the output coin."""
    return _branch(_evolve(c, zs), 0, c.fn, zs)


def run_multifunctional(c, zs: Sequence) -> tuple[SimulationResult, SimulationResult]:
    """Branch 0 from indices {0, 1}; branch 1 (qubit 2 reads 1) from indices {2, 3}."""
    psi = _evolve(c, zs)
    return _branch(psi, 0, c.g0, zs), _branch(psi, 2, c.g1, zs)


def sample(c, zs: Sequence, shots: int, seed: int) -> SampleResult:
    if shots < 1:
        raise DomainError("shots must be >= 1")
    psi = _evolve(c, zs)
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    outcome = {"0": int(counts[0]), "1": int(counts[1])}
    branches = {}
    if hasattr(c, "g1"):
        branches = {"0": int(counts[0] + counts[1]), "1": int(counts[2] + counts[3])}
    return SampleResult(
        shots=shots,
        herald_successes=int(counts[0] + counts[1]),
        outcome_counts=outcome,
        rng_seed=seed,
        branch_counts=branches,
    )


def cascade(inner, outer, zs_inner: Sequence, zs_outer_rest: Sequence) -> SimulationResult:
    """Feed ``inner``'s output qubit into ``outer`` as its first variable's single coin.

    Both heralds must succeed. The reported fidelity compares against the
    composition ``outer(inner(zs_inner), *zs_outer_rest)``.
    """
    if outer.ns[0] != 1:
        raise DomainError("the outer circuit must take one coin for its first variable")
    n1 = inner.num_qubits
    n2 = outer.num_qubits
    rest = input_state([0j] + list(zs_outer_rest), (0,) + tuple(outer.ns[1:]), outer.m).amps
    psi = np.kron(rest, _evolve(inner, zs_inner))
    total = n1 + n2 - 1
    targets = [0] + list(range(n1, total))
    psi = apply_unitary(psi, total, outer.U, targets)
    amp0, amp1 = complex(psi[0]), complex(psi[1])
    prob = abs(amp0) ** 2 + abs(amp1) ** 2
    if prob <= 0.0:
        return SimulationResult(0.0, None, float("nan"), (amp0, amp1))
    out = np.array([amp0, amp1]) / math.sqrt(prob)
    mid = inner.fn.value(list(zs_inner))
    target = outer.fn.value([mid] + list(zs_outer_rest))
    fid = float("nan") if cmath.isnan(target) else fidelity_to_coin(out, target)
    return SimulationResult(float(prob), out, fid, (amp0, amp1))


@dataclass
class VerifyReport:
    points: list
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"passed": self.passed, "points": self.points, "failures": self.failures}


def _fmt(z) -> str:
    if is_inf(z):
        return "inf"
    z = complex(z)
    return f"{z.real!r}{z.imag:+}i"


def verify(c, f, grid: Sequence[Sequence], raise_on_failure: bool = True) -> VerifyReport:
    """Check the heralded output against ``|f(z)>`` on every grid point.

    When the register is exactly the function's degree (and ``f`` is a
    reduced rational function) the herald probability must also be positive
    everywhere, infinity included.
    """
    if not grid:
        raise DomainError("empty verification grid")
    pol = current_policy()
    exact = f.k == 1 and getattr(f, "is_reduced", False) and tuple(c.ns) == tuple(f.degrees)
    points, failures = [], []
    for zs in grid:
        zs = list(zs)
        res = _branch(_evolve(c, zs), 0, f, zs)
        label = [_fmt(z) for z in zs]
        entry = {"z": label, "success_prob": res.success_prob}
        if res.success_prob > pol.branch_threshold:
            entry["fidelity"] = res.fidelity
            if not (res.fidelity >= 1 - pol.fidelity_tol):
                failures.append({"z": label, "reason": f"fidelity {res.fidelity}"})
        if exact and not res.success_prob > 0:
            failures.append({"z": label, "reason": "zero herald probability at minimal register"})
        points.append(entry)
    report = VerifyReport(points, failures)
    if failures and raise_on_failure:
        raise VerificationError(f"{len(failures)} grid point(s) failed", report)
    return report
