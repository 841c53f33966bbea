"""Closed-form herald probabilities, ensemble means and the qubit-count sweep."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError
from .poly import eval_dense, is_inf
from .synth import abc, check_register, solve_xyk

ENSEMBLES = ("uniform", "covariant")


def _denominator(a: float, b: float, c: complex) -> float:
    return math.sqrt((a - b) ** 2 + 4 * abs(c) ** 2) + a + b


def success_probability(f, ns: Sequence[int], zs: Sequence) -> float:
    """Optimal herald probability of an ``ns``-coin circuit for ``f`` at ``zs``.

    Coordinates at infinity use the degree-``n`` coefficients, the limit of
    the monomial ratio against ``(1 + |z|^2)^n``.
    """
    return success_probability_w(f, ns, zs, 0.0)


def success_probability_w(f, ns: Sequence[int], zs: Sequence, w: float) -> float:
    """Herald probability with the extra ``w |theta1>`` component in the second row."""
    ns = check_register(f, ns)
    if len(zs) != len(ns):
        raise DomainError(f"{len(zs)} values for {len(ns)} variables")
    s = solve_xyk(*abc(f, ns), w=w)
    P, Q = f.dense(ns)
    num = abs(eval_dense(P, zs, ns)) ** 2 + abs(eval_dense(Q, zs, ns)) ** 2
    den = 1.0
    for z, n in zip(zs, ns):
        if not is_inf(z):
            den *= (1 + abs(complex(z)) ** 2) ** n
    return float(s.K**2 * num / den)


def success_probability_array(f, n: int, z: np.ndarray) -> np.ndarray:
    """Vectorized univariate version; entries equal to ``inf`` take the limit value."""
    (n,) = check_register(f, [n])
    a, b, c = abc(f, [n])
    P, Q = f.dense([n])
    z = np.asarray(z, dtype=complex)
    inf = np.isinf(z)
    zf = np.where(inf, 0, z)
    Pz = np.polynomial.polynomial.polyval(zf, P)
    Qz = np.polynomial.polynomial.polyval(zf, Q)
    out = 2 * (np.abs(Pz) ** 2 + np.abs(Qz) ** 2) / ((1 + np.abs(zf) ** 2) ** n * _denominator(a, b, c))
    top = 2 * (abs(P[n]) ** 2 + abs(Q[n]) ** 2) / _denominator(a, b, c)
    return np.where(inf, top, out)


def _univariate(f):
    if f.k != 1:
        raise DomainError("ensemble means are only available for univariate functions")


def mean_uniform(f, n: int) -> float:
    """Average over Haar-random coins on the whole Bloch sphere."""
    _univariate(f)
    a, b, c = abc(f, [n])
    return 2 * (a + b) / ((n + 1) * _denominator(a, b, c))


def mean_covariant(f, n: int) -> float:
    """Average over equatorial coins ``(e^{i phi}|0> + |1>)/sqrt 2``.

    On the equator ``(1 + |z|^2)^n = 2^n`` and the phase average of
    ``|P|^2 + |Q|^2`` is the coefficient energy, which gives
    ``2 sum(|p_j|^2 + |q_j|^2) / (2^n [l + a + b])``.
    """
    _univariate(f)
    a, b, c = abc(f, [n])
    P, Q = f.dense([n])
    total = float(np.sum(np.abs(P) ** 2 + np.abs(Q) ** 2))
    return 2 * total / (2**n * _denominator(a, b, c))


def haar_coins(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-random coin parameters: a uniform point on S^3 gives ``z = alpha / beta``."""
    g = rng.standard_normal((size, 4))
    alpha = g[:, 0] + 1j * g[:, 1]
    beta = g[:, 2] + 1j * g[:, 3]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = alpha / beta
    return np.where(beta == 0, complex("inf"), z)


def monte_carlo_uniform(f, n: int, samples: int = 10**6, seed: int = 0) -> tuple[float, float]:
    """Sample mean and standard error of the herald probability over Haar coins."""
    rng = np.random.default_rng(seed)
    vals = success_probability_array(f, n, haar_coins(rng, samples))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def covariant_quadrature(f, n: int, points: int = 4096) -> float:
    """Trapezoidal average over the equator (exact for trigonometric polynomials)."""
    phi = 2 * np.pi * np.arange(points) / points
    return float(success_probability_array(f, n, np.exp(1j * phi)).mean())


@dataclass(frozen=True)
class SweepRow:
    param: float
    n: int
    ensemble: str
    mean_prob: float
    is_argmax: bool = False


def sweep(
    family: Callable[[float], object],
    params: Iterable[float],
    n_values: Iterable[int],
    ensemble: str = "uniform",
) -> list[SweepRow]:
    """Ensemble mean per ``(param, n)``; larger ``n`` pads with roots at infinity.

    Registers below a member's degree are skipped. Rows come back sorted by
    ``(param, n)`` with the best ``n`` of each parameter flagged.
    """
    if ensemble not in ENSEMBLES:
        raise DomainError(f"unknown ensemble {ensemble!r}")
    mean = mean_uniform if ensemble == "uniform" else mean_covariant
    n_values = sorted(set(int(n) for n in n_values))
    rows = []
    for p in sorted(set(float(p) for p in params)):
        f = family(p)
        vals = [(n, mean(f, n)) for n in n_values if n >= f.degree]
        if not vals:
            continue
        best = max(vals, key=lambda t: t[1])[0]
        rows += [SweepRow(p, n, ensemble, v, n == best) for n, v in vals]
    return rows


def argmax_n(rows: Sequence[SweepRow]) -> dict:
    return {r.param: r.n for r in rows if r.is_argmax}


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "n", "ensemble", "mean_prob", "is_argmax"])
    for r in rows:
        w.writerow([repr(r.param), r.n, r.ensemble, repr(r.mean_prob), str(r.is_argmax).lower()])
    return buf.getvalue()
