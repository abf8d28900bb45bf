import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlin.qsim import (
    Circuit,
    CircuitError,
    CircuitOp,
    ConfigurationError,
    StateVector,
    apply_gate,
    gate_matrix,
    marginal_probabilities,
    partial_trace,
    qubit_probabilities,
    run_circuit,
    ry_matrix,
    zero_state,
)
from qlin.qlinapprox import build_modified_circuit, R

SQ = 1 / math.sqrt(2)
# cos(pi/8), sin(pi/8) from the half-angle identities, independent of math.cos
COS_PI_8 = math.sqrt(2 + math.sqrt(2)) / 2
SIN_PI_8 = math.sqrt(2 - math.sqrt(2)) / 2


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n, v / np.linalg.norm(v))


def bell():
    return run_circuit(Circuit(2).h(0).cx(0, 1))


@pytest.mark.parametrize("n", [1, 2, 6])
def test_zero_state(n):
    s = zero_state(n)
    expected = np.zeros(2**n)
    expected[0] = 1
    np.testing.assert_array_equal(s.amplitudes, expected)


@pytest.mark.parametrize("n", [0, 25, -1])
def test_zero_state_out_of_range(n):
    with pytest.raises(ConfigurationError):
        zero_state(n)


def test_ry_matrix_values():
    np.testing.assert_allclose(ry_matrix(0), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(ry_matrix(math.pi), [[0, -1], [1, 0]], atol=1e-15)
    np.testing.assert_allclose(ry_matrix(math.pi / 4), [[COS_PI_8, -SIN_PI_8], [SIN_PI_8, COS_PI_8]], atol=1e-15)
    np.testing.assert_allclose(ry_matrix(math.pi / 4), [[0.92388, -0.38268], [0.38268, 0.92388]], atol=1e-5)


@pytest.mark.parametrize("theta", [math.inf, -math.inf, math.nan])
def test_ry_matrix_rejects_non_finite(theta):
    with pytest.raises(ValueError):
        ry_matrix(theta)


@pytest.mark.parametrize("gate", ["h", "x", "cx", "ch", "ccx", "cu3"])
@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4, -2.0])
def test_gate_matrices_unitary(gate, theta):
    g = gate_matrix(gate, theta if gate == "cu3" else None)
    assert g.shape[0] in (2, 4, 8)
    assert np.max(np.abs(g @ g.conj().T - np.eye(g.shape[0]))) < 1e-12


def test_hadamard_on_zero():
    s = apply_gate(zero_state(1), CircuitOp("h", (), (0,)))
    np.testing.assert_allclose(s.amplitudes, [SQ, SQ], atol=1e-15)


def test_cnot_builds_bell_pair():
    s = StateVector(2, np.array([SQ, SQ, 0, 0]))  # (|00> + |10>)/sqrt2 with qubit 0 = 1 in |10>
    s = apply_gate(s, CircuitOp("cx", (0,), (1,)))
    np.testing.assert_allclose(s.amplitudes, [SQ, 0, 0, SQ], atol=1e-15)


def test_cu3_on_bell_matches_case_one_first_step():
    # control qubit 1 listed second; target 0 first: ket |q0 q1>
    theta = math.pi / 4
    s = apply_gate(bell(), CircuitOp("cu3", (1,), (0,), theta))
    amp = s.amplitudes
    # index = q0 + 2*q1
    assert amp[0] == pytest.approx(SQ)
    assert amp[2] == pytest.approx(-SQ * SIN_PI_8)  # |q0=0, q1=1>
    assert amp[3] == pytest.approx(SQ * COS_PI_8)
    assert abs(amp[1]) < 1e-15


def test_controlled_gate_only_acts_on_all_ones():
    s = run_circuit(Circuit(3).x(0).ccx(0, 1, 2))
    assert s.probabilities()[1] == pytest.approx(1)
    s = run_circuit(Circuit(3).x(0).x(1).ccx(0, 1, 2))
    assert s.probabilities()[7] == pytest.approx(1)


def test_run_circuit_basic():
    np.testing.assert_array_equal(run_circuit(Circuit(2)).amplitudes, [1, 0, 0, 0])
    np.testing.assert_allclose(bell().amplitudes, [SQ, 0, 0, SQ], atol=1e-15)


def test_barrier_is_identity():
    s = random_state(3, 1)
    assert apply_gate(s, CircuitOp("barrier", (), (0, 2))) is s


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gate="foo", targets=(0,)),
        dict(gate="cx", controls=(1,), targets=(1,)),
        dict(gate="cu3", controls=(0,), targets=(1,)),
        dict(gate="ccx", controls=(0,), targets=(1,)),
        dict(gate="h", targets=(0, 1)),
        dict(gate="x", targets=(0,), theta=1.0),
    ],
)
def test_bad_ops_rejected(kwargs):
    with pytest.raises(CircuitError):
        CircuitOp(**kwargs)


def test_index_out_of_range():
    with pytest.raises(CircuitError):
        Circuit(2).cx(0, 2)


def test_partial_trace_examples():
    np.testing.assert_allclose(partial_trace(zero_state(2), [0]), [[1, 0], [0, 0]], atol=1e-15)
    np.testing.assert_allclose(partial_trace(bell(), [0]), [[0.5, 0], [0, 0.5]], atol=1e-15)
    rho = partial_trace(run_circuit(build_modified_circuit(math.pi / 4)), [R])
    np.testing.assert_allclose(np.diag(rho).real, [0.85355339, 0.14644661], atol=1e-8)


@pytest.mark.parametrize("keep", [[], [3], [0, 0]])
def test_partial_trace_rejects_bad_keep(keep):
    with pytest.raises(ValueError):
        partial_trace(bell(), keep)


def test_partial_trace_ordering():
    # |q1 q0> = |10>: keep [0, 1] -> index 2
    s = run_circuit(Circuit(3).x(1))
    rho = partial_trace(s, [0, 1])
    assert rho[2, 2] == pytest.approx(1)


def test_qubit_probabilities_examples():
    assert qubit_probabilities(run_circuit(Circuit(1).x(0)), 0) == pytest.approx((0, 1))
    for q in (0, 1):
        assert qubit_probabilities(bell(), q) == pytest.approx((0.5, 0.5))
    with pytest.raises(ValueError):
        qubit_probabilities(bell(), 2)


def test_marginal_probabilities_matches_partial_trace():
    s = random_state(4, 3)
    m = marginal_probabilities(s, [1, 3])
    np.testing.assert_allclose(m, np.diag(partial_trace(s, [1, 3])).real, atol=1e-14)


def test_json_round_trip():
    qc = build_modified_circuit(0.3)
    again = Circuit.from_json(qc.to_json())
    assert again == qc
    assert again.to_dict()["ops"][0] == {"gate": "h", "controls": [], "targets": [0]}


@pytest.mark.parametrize(
    "payload",
    [
        {"qubits": 2, "ops": [], "name": "x"},
        {"qubits": 2, "ops": [{"gate": "h", "targets": [0], "label": "a"}]},
        {"qubits": 2, "ops": [{"gate": "cu3", "controls": [0], "targets": [1]}]},
        {"qubits": 2},
    ],
)
def test_json_loader_rejects(payload):
    with pytest.raises(CircuitError):
        Circuit.from_dict(payload)


# -- properties -------------------------------------------------------------

ops_strategy = st.lists(
    st.one_of(
        st.tuples(st.just("h"), st.integers(0, 3)),
        st.tuples(st.just("x"), st.integers(0, 3)),
        st.tuples(st.just("cx"), st.permutations(range(4))),
        st.tuples(st.just("ch"), st.permutations(range(4))),
        st.tuples(st.just("ccx"), st.permutations(range(4))),
        st.tuples(st.floats(-10, 10), st.permutations(range(4))),
    ),
    max_size=25,
)


def _build(spec):
    qc = Circuit(4)
    for gate, arg in spec:
        if gate in ("h", "x"):
            getattr(qc, gate)(arg)
        elif gate in ("cx", "ch"):
            getattr(qc, gate)(arg[0], arg[1])
        elif gate == "ccx":
            qc.ccx(arg[0], arg[1], arg[2])
        else:
            qc.cu3(gate, arg[0], arg[1])
    return qc


@settings(max_examples=60, deadline=None)
@given(ops_strategy)
def test_norm_preserved_after_every_op(spec):
    state = zero_state(4)
    for op in _build(spec).ops:
        state = apply_gate(state, op)
        assert abs(state.norm_squared() - 1) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations(range(4)))
def test_involutions(seed, qs):
    s = random_state(4, seed)
    for op in (
        CircuitOp("h", (), (qs[0],)),
        CircuitOp("x", (), (qs[0],)),
        CircuitOp("cx", (qs[0],), (qs[1],)),
        CircuitOp("ccx", (qs[0], qs[1]), (qs[2],)),
    ):
        back = apply_gate(apply_gate(s, op), op)
        np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-10, 10), st.permutations(range(3)))
def test_cu3_inverse(seed, theta, qs):
    s = random_state(3, seed)
    out = apply_gate(apply_gate(s, CircuitOp("cu3", (qs[0],), (qs[1],), theta)), CircuitOp("cu3", (qs[0],), (qs[1],), -theta))
    np.testing.assert_allclose(out.amplitudes, s.amplitudes, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_qubit_probabilities_is_partial_trace_diagonal(seed, q):
    s = random_state(4, seed)
    rho = partial_trace(s, [q])
    assert qubit_probabilities(s, q) == (rho[0, 0].real, rho[1, 1].real)
    assert abs(np.trace(rho) - 1) < 1e-12
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(rho).min() >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(0, 4), min_size=1, max_size=3, unique=True))
def test_partial_trace_multi_qubit_is_density_matrix(seed, keep):
    rho = partial_trace(random_state(5, seed), keep)
    assert rho.shape == (2 ** len(keep),) * 2
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
