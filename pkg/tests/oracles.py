"""Independent reference computations used across the test suite.

Nothing here calls into the library's state or synthesis code; everything is
rebuilt from bitstrings, explicit sums and brute force.
"""
import itertools
import math

import numpy as np

from qqbf.poly import MultiPoly, MultiRationalFn, Poly, RationalFn, coprime_check

S2 = 1 / math.sqrt(2)


def mrf(p, q, k=2):
    return MultiRationalFn(MultiPoly(k, p), MultiPoly(k, q))


def product_fn():
    return mrf({(1, 1): 1}, {(0, 0): 1})


def sum_fn():
    return mrf({(1, 0): 1, (0, 1): 1}, {(0, 0): 1})


def scaled_sum_fn():
    return mrf({(1, 0): S2, (0, 1): S2}, {(0, 0): 1})


def coin(z):
    if z == complex("inf"):
        return np.array([1, 0], dtype=complex)
    z = complex(z)
    return np.array([z, 1]) / math.sqrt(1 + abs(z) ** 2)


def bits(index, width):
    """Bit list, qubit 1 first (least significant)."""
    return [(index >> b) & 1 for b in range(width)]


def brute_input_state(zs, ns, m=0):
    """Amplitude of every basis index as a product over its qubits."""
    width = sum(ns) + m
    owner = [v for v, n in enumerate(ns) for _ in range(n)]
    out = np.zeros(2**width, dtype=complex)
    for idx in range(2**width):
        b = bits(idx, width)
        if any(b[sum(ns):]):
            continue
        amp = 1.0 + 0j
        for q, v in enumerate(owner):
            amp *= coin(zs[v])[b[q]]
        out[idx] = amp
    return out


def brute_symmetric(n, j):
    out = np.zeros(2**n, dtype=complex)
    for idx in range(2**n):
        if bits(idx, n).count(0) == j:
            out[idx] = 1
    return out / np.linalg.norm(out)


def herald_probability(U, psi, offset=0):
    amps = U @ psi
    return abs(amps[offset]) ** 2 + abs(amps[offset + 1]) ** 2


def coin_fidelity(a0, a1, target):
    v = np.array([a0, a1]) / math.hypot(abs(a0), abs(a1))
    return abs(np.vdot(coin(target), v)) ** 2


def product_prob(z1, z2):
    return (abs(z1 * z2) ** 2 + 1) / ((1 + abs(z1) ** 2) * (1 + abs(z2) ** 2))


def sum_prob(z1, z2):
    return (abs(z1 + z2) ** 2 + 1) / (2 * (1 + abs(z1) ** 2) * (1 + abs(z2) ** 2))


def cascade_prob(z1, z2):
    return (abs(z1 + z2) ** 2 + 1) / (3 * (1 + abs(z1) ** 2) * (1 + abs(z2) ** 2))


def rand_complex(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_rational(rng, max_degree=4):
    """Gaussian coefficients, regenerated until coprime (almost always at once)."""
    while True:
        dp, dq = rng.integers(0, max_degree + 1, size=2)
        if max(dp, dq) == 0:
            continue
        P = Poly(rand_complex(rng, dp + 1))
        Q = Poly(rand_complex(rng, dq + 1))
        if coprime_check(P, Q):
            return RationalFn(P, Q)


def random_multirational(rng, max_degree=2, k=2):
    shape = tuple(int(d) + 1 for d in rng.integers(1, max_degree + 1, size=k))
    while True:
        terms_p, terms_q = {}, {}
        for idx in itertools.product(*[range(s) for s in shape]):
            if rng.random() < 0.7:
                terms_p[idx] = complex(rand_complex(rng))
            if rng.random() < 0.7:
                terms_q[idx] = complex(rand_complex(rng))
        if not terms_q:
            continue
        f = mrf(terms_p, terms_q, k)
        if all(d >= 1 for d in f.degrees):
            return f


def random_point(rng, k):
    return [complex(z) for z in rand_complex(rng, k)]


def equator_average(fn, points=20000):
    """Plain Riemann average of ``fn(e^{i phi})`` on a fine grid."""
    phi = 2 * np.pi * (np.arange(points) + 0.5) / points
    return float(np.mean([fn(np.exp(1j * p)) for p in phi]))
