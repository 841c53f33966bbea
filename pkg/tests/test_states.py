import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_input_state, brute_symmetric
from qqbf.errors import DomainError
from qqbf.poly import INF
from qqbf.policy import NumericPolicy, using_policy
from qqbf.states import (
    StateVector,
    coin_amplitudes,
    fidelity_to_coin,
    input_state,
    symmetric_basis_vector,
    symmetric_product_basis,
)

S2 = 1 / math.sqrt(2)
ext = st.one_of(
    st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
    st.just(INF),
)


@pytest.mark.parametrize("z, expected", [(0, (0, 1)), (INF, (1, 0)), (1, (S2, S2))])
def test_coin_amplitudes(z, expected):
    assert np.allclose(coin_amplitudes(z), expected, atol=1e-15)


def test_symmetric_examples():
    assert np.allclose(symmetric_basis_vector(1, 1).amps, [1, 0])
    assert np.allclose(symmetric_basis_vector(2, 1).amps, [0, S2, S2, 0])
    v = symmetric_basis_vector(3, 2).amps
    # bitstrings with two zeros: indices 1, 2, 4
    assert np.allclose(v, np.array([0, 1, 1, 0, 1, 0, 0, 0]) / math.sqrt(3))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_symmetric_orthonormal_and_brute(n):
    vs = [symmetric_basis_vector(n, j).amps for j in range(n + 1)]
    G = np.array([[np.vdot(a, b) for b in vs] for a in vs])
    assert np.abs(G - np.eye(n + 1)).max() < 1e-14
    for j, v in enumerate(vs):
        assert np.allclose(v, brute_symmetric(n, j), atol=1e-15)


def test_symmetric_out_of_range():
    with pytest.raises(DomainError):
        symmetric_basis_vector(2, 3)


@pytest.mark.parametrize(
    "zs, ns, expected",
    [
        ([0], [1], [0, 1]),
        ([1], [2], [0.5, 0.5, 0.5, 0.5]),
        ([2], [2], np.array([4, 2, 2, 1]) / 5),
    ],
)
def test_input_state_examples(zs, ns, expected):
    assert np.allclose(input_state(zs, ns).amps, expected, atol=1e-15)


def test_input_state_requires_variables():
    with pytest.raises(DomainError):
        input_state([], [])


@settings(max_examples=100, deadline=None)
@given(st.lists(ext, min_size=1, max_size=3), st.data())
def test_input_state_matches_bitwise_product(zs, data):
    ns = [data.draw(st.integers(1, 3)) for _ in zs]
    m = data.draw(st.integers(0, 1))
    psi = input_state(zs, ns, m).amps
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert np.allclose(psi, brute_input_state(zs, ns, m), atol=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False), st.integers(1, 6))
def test_symmetric_projection_coefficients(z, n):
    psi = input_state([z], [n]).amps
    for j in range(n + 1):
        got = np.vdot(symmetric_basis_vector(n, j).amps, psi)
        want = z**j * math.sqrt(math.comb(n, j)) / (1 + abs(z) ** 2) ** (n / 2)
        assert abs(got - want) < 1e-12


def test_symmetric_product_basis_layout():
    S, idx = symmetric_product_basis([1, 2], m=1)
    assert S.shape == (16, 6)
    assert idx == list(np.ndindex(2, 3))
    # column (j1, j2) = |0>_anc (x) s_j2 (x) s_j1, variable 1 in the low bit
    col = dict(zip(idx, S.T))
    want = np.kron([1, 0], np.kron(brute_symmetric(2, 1), brute_symmetric(1, 0)))
    assert np.allclose(col[(0, 1)], want)


@pytest.mark.parametrize(
    "v, z, expected",
    [([1, 0], INF, 1.0), ([1, 0], 0, 0.0), ([S2, S2], 1, 1.0)],
)
def test_fidelity_examples(v, z, expected):
    assert fidelity_to_coin(np.array(v, dtype=complex), z) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_fidelity_phase_invariant(phase, z):
    v = np.array([0.6, 0.8j])
    assert fidelity_to_coin(v, z) == pytest.approx(fidelity_to_coin(np.exp(1j * phase) * v, z), abs=1e-14)


def test_fidelity_rejects_unnormalized():
    with pytest.raises(DomainError):
        fidelity_to_coin(np.array([1.0, 1.0]), 1)


def test_statevector_invariants():
    StateVector(1, np.zeros(2))
    with pytest.raises(DomainError):
        StateVector(1, np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        StateVector(2, np.array([1.0, 0.0]))
    sv = StateVector(1, np.array([0, 1j]))
    with pytest.raises(ValueError):
        sv.amps[0] = 1
    again = StateVector.from_json(json.loads(json.dumps(sv.to_json())))
    assert np.array_equal(again.amps, sv.amps)


def test_qubit_guard():
    with using_policy(NumericPolicy(max_qubits=3)):
        with pytest.raises(DomainError):
            input_state([1], [4])
