"""Complex polynomials and rational functions in one or several variables.

Univariate polynomials are stored densely in ascending powers; multivariate
ones as a sparse ``{multi-index: coefficient}`` map. The point at infinity is
represented by :data:`INF` (``complex("inf")``); any complex value with an
infinite component is treated as that single point.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError
from .policy import current_policy

INF = complex("inf")


def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def _ratio(num: complex, den: complex) -> complex:
    if den == 0:
        return complex("nan") if num == 0 else INF
    return num / den


def _check_finite(values):
    for v in values:
        if not cmath.isfinite(v):
            raise DomainError(f"non-finite coefficient {v!r}")


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial, ``coeffs[j]`` multiplies ``z**j``."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable):
        cs = [complex(c) for c in coeffs]
        _check_finite(cs)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs) if cs else (0j,))

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def coeff(self, j: int) -> complex:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0j

    def __call__(self, z):
        return evaluate(self, z)

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(np.convolve(self.coeffs, other.coeffs))

    def scale(self, lam: complex) -> "Poly":
        return Poly([lam * c for c in self.coeffs])

    def to_json(self) -> dict:
        return {"coeffs": [[c.real, c.imag] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Poly":
        _reject_unknown(data, {"coeffs"}, "polynomial")
        return cls(_pair_to_complex(p) for p in data["coeffs"])


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial in ``k`` variables; ``terms`` maps exponent tuples to coefficients."""

    k: int
    terms: tuple

    def __init__(self, k: int, terms: Mapping | Iterable = ()):
        if k < 1:
            raise DomainError("a multivariate polynomial needs k >= 1")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for idx, c in items:
            idx = tuple(int(j) for j in idx)
            if len(idx) != k or any(j < 0 for j in idx):
                raise DomainError(f"bad multi-index {idx} for k={k}")
            acc[idx] = acc.get(idx, 0j) + complex(c)
        _check_finite(acc.values())
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "terms", tuple(sorted((i, c) for i, c in acc.items() if c != 0)))

    @classmethod
    def from_poly(cls, p: Poly, k: int = 1, var: int = 0) -> "MultiPoly":
        def idx(j):
            out = [0] * k
            out[var] = j
            return tuple(out)

        return cls(k, {idx(j): c for j, c in enumerate(p.coeffs)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> tuple:
        if self.is_zero:
            return (-1,) * self.k
        return tuple(max(i[v] for i, _ in self.terms) for v in range(self.k))

    def __call__(self, zs):
        return multi_eval(self, zs)

    def dense(self, shape: Sequence[int]) -> np.ndarray:
        arr = np.zeros(tuple(shape), dtype=complex)
        for idx, c in self.terms:
            if any(j >= s for j, s in zip(idx, shape)):
                raise DomainError(f"term {idx} exceeds register shape {tuple(shape)}")
            arr[idx] = c
        return arr

    def scale(self, lam: complex) -> "MultiPoly":
        return MultiPoly(self.k, [(i, lam * c) for i, c in self.terms])

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "terms": [{"index": list(i), "re": c.real, "im": c.imag} for i, c in self.terms],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        _reject_unknown(data, {"k", "terms"}, "multivariate polynomial")
        terms = []
        for t in data["terms"]:
            _reject_unknown(t, {"index", "re", "im"}, "term")
            terms.append((tuple(t["index"]), complex(t.get("re", 0.0), t.get("im", 0.0))))
        return cls(int(data["k"]), terms)


def evaluate(p: Poly, z) -> complex:
    """Horner evaluation; at infinity a non-constant polynomial is infinite."""
    if is_inf(z):
        return INF if p.degree >= 1 else p.coeffs[0]
    z = complex(z)
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def multi_eval(p: MultiPoly, zs: Sequence) -> complex:
    if len(zs) != p.k:
        raise DomainError(f"expected {p.k} variables, got {len(zs)}")
    zs = [complex(z) for z in zs]
    if any(is_inf(z) for z in zs):
        raise DomainError("multi_eval takes finite points; use eval_dense for infinity limits")
    total = 0j
    for idx, c in p.terms:
        term = c
        for z, j in zip(zs, idx):
            term *= z**j
        total += term
    return total


def eval_dense(arr: np.ndarray, zs: Sequence, top: Sequence[int]) -> complex:
    """Evaluate a dense coefficient tensor at ``zs``.

    For a coordinate at infinity the tensor is sliced at exponent ``top[i]``:
    the limit of ``P(z) / z**top[i]``. Callers pick ``top`` as either the
    function's degree (value of the function) or the register size
    (probability limits).
    """
    a = np.asarray(arr, dtype=complex)
    for z, t in zip(zs, top):
        if is_inf(z):
            a = a[t] if t < a.shape[0] else np.zeros(a.shape[1:], dtype=complex)
        else:
            a = np.tensordot(complex(z) ** np.arange(a.shape[0]), a, axes=(0, 0))
    return complex(a)


@dataclass(frozen=True)
class RationalFn:
    """Coprime pair ``P/Q`` of univariate polynomials."""

    P: Poly
    Q: Poly

    def __post_init__(self):
        if self.Q.is_zero:
            raise DomainError("denominator is the zero polynomial")
        if not coprime_check(self.P, self.Q):
            raise DomainError("numerator and denominator share a common factor")

    k = 1
    is_reduced = True

    @classmethod
    def from_coeffs(cls, p: Iterable, q: Iterable) -> "RationalFn":
        return cls(Poly(p), Poly(q))

    @property
    def degree(self) -> int:
        return max(self.P.degree, self.Q.degree, 0)

    @property
    def degrees(self) -> tuple:
        return (self.degree,)

    def dense(self, ns: Sequence[int]):
        n = ns[0]
        return (
            np.array([self.P.coeff(j) for j in range(n + 1)]),
            np.array([self.Q.coeff(j) for j in range(n + 1)]),
        )

    def value(self, zs) -> complex:
        return rational_eval(self, zs[0])

    def __call__(self, z):
        return rational_eval(self, z)

    def scale(self, lam: complex) -> "RationalFn":
        return RationalFn(self.P.scale(lam), self.Q.scale(lam))

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "Q": self.Q.to_json()}


@dataclass(frozen=True)
class MultiRationalFn:
    """Ratio of two ``k``-variable polynomials.

    Only ``Q != 0`` is enforced; there is no multivariate coprimality test.
    """

    P: MultiPoly
    Q: MultiPoly

    def __post_init__(self):
        if self.P.k != self.Q.k:
            raise DomainError("numerator and denominator disagree on variable count")
        if self.Q.is_zero:
            raise DomainError("denominator is the zero polynomial")

    is_reduced = True

    @property
    def k(self) -> int:
        return self.P.k

    @property
    def degrees(self) -> tuple:
        return tuple(max(a, b, 0) for a, b in zip(self.P.degrees, self.Q.degrees))

    def dense(self, ns: Sequence[int]):
        shape = [n + 1 for n in ns]
        return self.P.dense(shape), self.Q.dense(shape)

    def value(self, zs) -> complex:
        if len(zs) != self.k:
            raise DomainError(f"expected {self.k} variables, got {len(zs)}")
        degs = self.degrees
        p, q = self.dense(degs)
        return _ratio(eval_dense(p, zs, degs), eval_dense(q, zs, degs))

    def __call__(self, *zs):
        return self.value(zs)

    def scale(self, lam: complex) -> "MultiRationalFn":
        return MultiRationalFn(self.P.scale(lam), self.Q.scale(lam))

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "Q": self.Q.to_json()}


@dataclass(frozen=True)
class PaddedPair:
    """``(P, Q)`` deliberately sharing a factor, aimed at a register of ``target_n`` coins.

    Produced by :func:`pad`; kept apart from :class:`RationalFn` so the
    coprimality invariant there is never silently broken.
    """

    P: Poly
    Q: Poly
    target_n: int

    k = 1
    is_reduced = False

    @property
    def degrees(self) -> tuple:
        return (self.target_n,)

    def dense(self, ns):
        return RationalFn.dense(self, ns)

    def value(self, zs) -> complex:
        z = zs[0]
        n = self.target_n
        if is_inf(z):
            return _ratio(self.P.coeff(n), self.Q.coeff(n))
        return _ratio(self.P(z), self.Q(z))

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "Q": self.Q.to_json(), "target_n": self.target_n}


def rational_eval(f: RationalFn, z) -> complex:
    if is_inf(z):
        n = f.degree
        return _ratio(f.P.coeff(n), f.Q.coeff(n))
    return _ratio(f.P(z), f.Q(z))


def sylvester_matrix(P: Poly, Q: Poly) -> np.ndarray:
    m, n = P.degree, Q.degree
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    p = np.array(P.coeffs[::-1])
    q = np.array(Q.coeffs[::-1])
    for i in range(n):
        S[i, i : i + m + 1] = p
    for i in range(m):
        S[n + i, i : i + n + 1] = q
    return S


def normalized_resultant(P: Poly, Q: Poly) -> float:
    """``|Res(P, Q)| / (|P|^deg Q * |Q|^deg P)``, which lies in ``[0, 1]`` by Hadamard's bound."""
    if P.is_zero or Q.is_zero:
        other = Q if P.is_zero else P
        return 1.0 if other.degree == 0 else 0.0
    m, n = P.degree, Q.degree
    if m == 0 or n == 0:
        return 1.0
    det = abs(np.linalg.det(sylvester_matrix(P, Q)))
    scale = np.linalg.norm(P.coeffs) ** n * np.linalg.norm(Q.coeffs) ** m
    return float(det / scale)


def coprime_check(P: Poly, Q: Poly, tol: float | None = None) -> bool:
    tol = current_policy().coprime_tol if tol is None else tol
    return normalized_resultant(P, Q) > tol


def pad(f: RationalFn, r) -> PaddedPair:
    """Multiply both sides by ``(z - r)``; ``r = INF`` keeps the pair and raises the target degree."""
    n = f.degree + 1
    if is_inf(r):
        return PaddedPair(f.P, f.Q, n)
    lin = Poly([-complex(r), 1])
    return PaddedPair(f.P * lin, f.Q * lin, n)


def _pair_to_complex(p) -> complex:
    if isinstance(p, (list, tuple)):
        if len(p) != 2:
            raise DomainError(f"complex number must be [re, im], got {p!r}")
        return complex(float(p[0]), float(p[1]))
    return complex(float(p))


def _reject_unknown(data: Mapping, allowed: set, what: str):
    if not isinstance(data, Mapping):
        raise DomainError(f"{what} must be a JSON object")
    extra = set(data) - allowed
    if extra:
        raise DomainError(f"unknown {what} fields: {sorted(extra)}")


def poly_from_json(data: Mapping) -> Poly | MultiPoly:
    if isinstance(data, Mapping) and "terms" in data:
        return MultiPoly.from_json(data)
    return Poly.from_json(data)


def fn_from_json(data: Mapping):
    """Parse ``{"P": ..., "Q": ...}``; mixed uni/multivariate sides are promoted."""
    _reject_unknown(data, {"P", "Q", "target_n"}, "rational function")
    try:
        P, Q = poly_from_json(data["P"]), poly_from_json(data["Q"])
    except KeyError as exc:
        raise DomainError(f"missing field {exc}") from None
    if "target_n" in data:
        if not (isinstance(P, Poly) and isinstance(Q, Poly)):
            raise DomainError("padded pairs are univariate")
        return PaddedPair(P, Q, int(data["target_n"]))
    if isinstance(P, Poly) and isinstance(Q, Poly):
        return RationalFn(P, Q)
    k = P.k if isinstance(P, MultiPoly) else Q.k
    if isinstance(P, Poly):
        P = MultiPoly.from_poly(P, k)
    if isinstance(Q, Poly):
        Q = MultiPoly.from_poly(Q, k)
    return MultiRationalFn(P, Q)


def binom(n: int, j: int) -> int:
    return math.comb(n, j)
