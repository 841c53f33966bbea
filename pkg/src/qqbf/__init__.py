"""Heralded circuits that turn copies of a qubit coin |z> into |f(z)> for rational f."""
from .errors import (
    CapacityError,
    CompatibilityError,
    DomainError,
    NumericError,
    QQBFError,
    VerificationError,
)
from .multifunc import (
    CompatibilityReport,
    MultifunctionalCircuit,
    compatibility,
    dilation_unitary,
    synthesize_dilation,
    synthesize_priority,
)
from .policy import DEFAULT_POLICY, NumericPolicy, current_policy, using_policy
from .poly import INF, MultiPoly, MultiRationalFn, PaddedPair, Poly, RationalFn, coprime_check, pad
from .prob import mean_covariant, mean_uniform, success_probability, sweep
from .sim import cascade, run, run_multifunctional, sample, verify
from .states import StateVector, coin_amplitudes, input_state, symmetric_basis_vector
from .synth import QQBFCircuit, complete_unitary, synthesize

__version__ = "0.1.0"
