"""Numeric tolerances shared across modules.

The active policy lives in a context variable, so concurrent callers can use
different tolerances without touching each other::

    with using_policy(replace(current_policy(), orth_tol=1e-8)):
        synthesize(f)
"""
from __future__ import annotations

import contextlib
import contextvars
import json
import os
from dataclasses import asdict, dataclass, fields, replace

ENV_VAR = "QQBF_NUM_POLICY"


@dataclass(frozen=True)
class NumericPolicy:
    coprime_tol: float = 1e-9
    orth_tol: float = 1e-10
    residual_tol: float = 1e-12
    # x, y, |c| below zero_tol * (a + b) are snapped to exactly zero
    zero_tol: float = 1e-12
    branch_threshold: float = 1e-8
    fidelity_tol: float = 1e-9
    compat_tol: float = 1e-9
    contraction_tol: float = 1e-12
    eps_ladder: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    limit_ratio: float = 1e-4
    max_qubits: int = 24

    def to_dict(self):
        d = asdict(self)
        d["eps_ladder"] = list(self.eps_ladder)
        return d

    @classmethod
    def from_dict(cls, data, base=None):
        base = base or cls()
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown policy fields: {sorted(unknown)}")
        data = dict(data)
        if "eps_ladder" in data:
            data["eps_ladder"] = tuple(float(e) for e in data["eps_ladder"])
        return replace(base, **data)


DEFAULT_POLICY = NumericPolicy()
_current = contextvars.ContextVar("qqbf_policy", default=DEFAULT_POLICY)


def current_policy() -> NumericPolicy:
    return _current.get()


@contextlib.contextmanager
def using_policy(policy: NumericPolicy):
    token = _current.set(policy)
    try:
        yield policy
    finally:
        _current.reset(token)


def policy_from_env(environ=None) -> NumericPolicy:
    environ = os.environ if environ is None else environ
    path = environ.get(ENV_VAR)
    if not path:
        return DEFAULT_POLICY
    with open(path) as fh:
        return NumericPolicy.from_dict(json.load(fh))
