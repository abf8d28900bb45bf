"""Dense statevector simulator for small circuits over {H, X, CX, CCX, CH, CU3}.

Qubit 0 is the least-significant bit of the basis-state index, so for two
qubits the amplitude of |q1 q0> lives at index ``2*q1 + q0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 24

# gate id -> number of controls it takes
GATE_CONTROLS = {"h": 0, "x": 0, "cx": 1, "ch": 1, "cu3": 1, "ccx": 2, "barrier": None}
_ALIASES = {"cnot": "cx", "toffoli": "ccx"}

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


class CircuitError(ValueError):
    """Raised for malformed circuits, ops or circuit files."""


class ConfigurationError(ValueError):
    """Raised for out-of-range simulator configuration."""


def ry_matrix(theta: float) -> np.ndarray:
    """Real rotation [[cos t/2, -sin t/2], [sin t/2, cos t/2]], i.e. U3(theta, 0, 0)."""
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _base_matrix(gate: str, theta: float | None) -> np.ndarray:
    if gate in ("h", "ch"):
        return _H
    if gate in ("x", "cx", "ccx"):
        return _X
    if gate == "cu3":
        if theta is None:
            raise CircuitError("cu3 requires an angle")
        return ry_matrix(theta)
    raise CircuitError(f"unknown gate {gate!r}")


def gate_matrix(gate: str, theta: float | None = None) -> np.ndarray:
    """Full unitary of ``gate`` with controls as the high-order qubits.

    For controlled gates the returned matrix is block-diagonal: identity on
    every control pattern except all-ones, where the base 2x2 gate acts.
    """
    gate = normalize_gate(gate)
    if gate == "barrier":
        raise CircuitError("barrier has no matrix")
    base = _base_matrix(gate, theta)
    dim = 2 ** (GATE_CONTROLS[gate] + 1)
    full = np.eye(dim, dtype=complex)
    full[dim - 2:, dim - 2:] = base
    return full


def normalize_gate(gate: str) -> str:
    g = gate.lower()
    g = _ALIASES.get(g, g)
    if g not in GATE_CONTROLS:
        raise CircuitError(f"unknown gate {gate!r}")
    return g


@dataclass(frozen=True)
class CircuitOp:
    gate: str
    controls: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()
    theta: float | None = None

    def __post_init__(self):
        g = normalize_gate(self.gate)
        object.__setattr__(self, "gate", g)
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if g == "barrier":
            return
        if len(self.targets) != 1:
            raise CircuitError(f"{g} acts on exactly one target, got {self.targets}")
        if len(self.controls) != GATE_CONTROLS[g]:
            raise CircuitError(f"{g} takes {GATE_CONTROLS[g]} control(s), got {self.controls}")
        qubits = self.controls + self.targets
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"index collision in {g} op: {qubits}")
        if g == "cu3":
            if self.theta is None:
                raise CircuitError("cu3 requires an angle")
            if not math.isfinite(self.theta):
                raise CircuitError(f"cu3 angle must be finite, got {self.theta!r}")
        elif self.theta is not None:
            raise CircuitError(f"{g} takes no angle")

    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def to_dict(self) -> dict:
        d = {"gate": self.gate, "controls": list(self.controls), "targets": list(self.targets)}
        if self.gate == "cu3":
            d["theta"] = self.theta
        return d


@dataclass
class Circuit:
    """Ordered list of ops over a fixed number of qubits.

    The builder methods mirror qiskit's argument order (controls first,
    target last) and return ``self`` so calls can be chained.
    """

    num_qubits: int
    ops: list[CircuitOp] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ConfigurationError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        for op in self.ops:
            self._check(op)

    def _check(self, op: CircuitOp) -> None:
        for q in op.qubits():
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"qubit index {q} out of range for {self.num_qubits} qubits")

    def append(self, op: CircuitOp) -> "Circuit":
        self._check(op)
        self.ops.append(op)
        return self

    def h(self, q: int) -> "Circuit":
        return self.append(CircuitOp("h", (), (q,)))

    def x(self, q: int) -> "Circuit":
        return self.append(CircuitOp("x", (), (q,)))

    def cx(self, c: int, t: int) -> "Circuit":
        return self.append(CircuitOp("cx", (c,), (t,)))

    def ch(self, c: int, t: int) -> "Circuit":
        return self.append(CircuitOp("ch", (c,), (t,)))

    def ccx(self, c1: int, c2: int, t: int) -> "Circuit":
        return self.append(CircuitOp("ccx", (c1, c2), (t,)))

    def cu3(self, theta: float, c: int, t: int) -> "Circuit":
        return self.append(CircuitOp("cu3", (c,), (t,), float(theta)))

    def barrier(self, *qubits: int) -> "Circuit":
        return self.append(CircuitOp("barrier", (), tuple(qubits)))

    def without(self, predicate) -> "Circuit":
        """Copy of the circuit with every op matching ``predicate`` dropped."""
        return Circuit(self.num_qubits, [op for op in self.ops if not predicate(op)])

    def to_dict(self) -> dict:
        return {"qubits": self.num_qubits, "ops": [op.to_dict() for op in self.ops]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        if not isinstance(data, dict):
            raise CircuitError("circuit must be a JSON object")
        extra = set(data) - {"qubits", "ops"}
        if extra:
            raise CircuitError(f"unknown circuit keys: {sorted(extra)}")
        if "qubits" not in data or "ops" not in data:
            raise CircuitError("circuit requires 'qubits' and 'ops'")
        ops = []
        for raw in data["ops"]:
            if not isinstance(raw, dict):
                raise CircuitError(f"op must be an object, got {raw!r}")
            extra = set(raw) - {"gate", "controls", "targets", "theta"}
            if extra:
                raise CircuitError(f"unknown op keys: {sorted(extra)}")
            if "gate" not in raw:
                raise CircuitError(f"op missing 'gate': {raw!r}")
            ops.append(
                CircuitOp(raw["gate"], tuple(raw.get("controls", ())), tuple(raw.get("targets", ())), raw.get("theta"))
            )
        return cls(int(data["qubits"]), ops)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ConfigurationError(
                f"expected {2 ** self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self):
        return len(self.amplitudes)


def zero_state(num_qubits: int) -> StateVector:
    if not isinstance(num_qubits, (int, np.integer)) or not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"num_qubits must be an integer in [1, {MAX_QUBITS}], got {num_qubits!r}")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(int(num_qubits), amps)


def basis_state(num_qubits: int, bits: dict[int, int] | int) -> StateVector:
    """Computational basis state; ``bits`` is an index or a {qubit: bit} map."""
    if isinstance(bits, dict):
        index = sum((b & 1) << q for q, b in bits.items())
    else:
        index = int(bits)
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _apply_controlled(psi: np.ndarray, n: int, matrix: np.ndarray, controls: Sequence[int], target: int) -> np.ndarray:
    # axis of qubit q in the C-ordered tensor is n - 1 - q
    t = psi.reshape((2,) * n).copy()
    index = [slice(None)] * n
    for c in controls:
        index[n - 1 - c] = 1
    index = tuple(index)
    sub = t[index]
    axis = n - 1 - target
    axis -= sum(1 for c in controls if n - 1 - c < axis)
    t[index] = np.moveaxis(np.tensordot(matrix, sub, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def apply_gate(state: StateVector, op: CircuitOp) -> StateVector:
    n = state.num_qubits
    for q in op.qubits():
        if not 0 <= q < n:
            raise CircuitError(f"qubit index {q} out of range for {n} qubits")
    if op.gate == "barrier":
        return state
    matrix = _base_matrix(op.gate, op.theta)
    out = _apply_controlled(state.amplitudes, n, matrix, op.controls, op.targets[0])
    return StateVector(n, out)


def run_circuit(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    state = initial if initial is not None else zero_state(circuit.num_qubits)
    if state.num_qubits != circuit.num_qubits:
        raise ConfigurationError("initial state size does not match circuit")
    for op in circuit.ops:
        state = apply_gate(state, op)
    return state


def _check_qubits(n: int, qubits: Iterable[int]) -> list[int]:
    qubits = list(qubits)
    if not qubits:
        raise ValueError("need at least one qubit to keep")
    for q in qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for {n} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices {qubits}")
    return qubits


def partial_trace(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep``; in the result keep[0] is the LSB."""
    n = state.num_qubits
    keep = sorted(_check_qubits(n, keep))
    t = state.amplitudes.reshape((2,) * n)
    front = [n - 1 - q for q in reversed(keep)]
    rest = [a for a in range(n) if a not in front]
    m = np.transpose(t, front + rest).reshape(2 ** len(keep), -1)
    return m @ m.conj().T


def qubit_probabilities(state: StateVector, qubit: int) -> tuple[float, float]:
    rho = partial_trace(state, [qubit])
    return float(rho[0, 0].real), float(rho[1, 1].real)


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Joint distribution of ``qubits``; entry i has qubits[k] = bit k of i."""
    n = state.num_qubits
    qubits = _check_qubits(n, qubits)
    p = state.probabilities().reshape((2,) * n)
    axes = [n - 1 - q for q in reversed(qubits)]
    rest = tuple(a for a in range(n) if a not in axes)
    return np.transpose(p.sum(axis=rest, keepdims=True), axes + list(rest)).reshape(-1)
