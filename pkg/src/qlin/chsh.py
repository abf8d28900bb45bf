"""CHSH game: win predicate, classical strategy enumeration, circuit builders.

Circuit layout for both builders:
x -> 0, y -> 1, f -> 2, a -> 3, b -> 4, where f accumulates
(x AND y) XOR a XOR b, so f = 0 exactly when the players win.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .qsim import Circuit, qubit_probabilities, run_circuit

X, Y, F, A, B = range(5)


def wins(x: int, y: int, a: int, b: int) -> bool:
    return (x & y) == (a ^ b)


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic strategy as lookup tables alice[x] and bob[y]."""

    alice: tuple[int, int]
    bob: tuple[int, int]

    def __post_init__(self):
        for table in (self.alice, self.bob):
            if len(table) != 2 or any(v not in (0, 1) for v in table):
                raise ValueError(f"strategy table must be two bits, got {table}")

    def respond(self, x: int, y: int) -> tuple[int, int]:
        return self.alice[x], self.bob[y]


@dataclass(frozen=True)
class GameResult:
    win_probability: float
    outcomes: dict[tuple[int, int], bool]


def play(strategy: ClassicalStrategy) -> GameResult:
    outcomes = {(x, y): wins(x, y, *strategy.respond(x, y)) for x in (0, 1) for y in (0, 1)}
    return GameResult(sum(outcomes.values()) / 4, outcomes)


def deterministic_strategies() -> list[ClassicalStrategy]:
    tables = list(itertools.product((0, 1), repeat=2))
    return [ClassicalStrategy(a, b) for a in tables for b in tables]


def best_classical_strategy() -> tuple[ClassicalStrategy, float]:
    # shared randomness is a convex mix of these, so it cannot beat the max
    best = max(deterministic_strategies(), key=lambda s: play(s).win_probability)
    return best, play(best).win_probability


def _prepare_input(qc: Circuit, q: int, value: int | None) -> None:
    if value is None:
        qc.h(q)
    elif value:
        qc.x(q)


def _win_readout(qc: Circuit) -> None:
    qc.ccx(X, Y, F)
    qc.cx(A, F)
    qc.cx(B, F)


def build_classical_chsh_circuit(
    strategy: str = "copy", x: int | None = None, y: int | None = None
) -> Circuit:
    """Boolean CHSH circuit.

    ``strategy="copy"`` draws a uniformly and clones it into b (a = b);
    ``"zero"`` leaves both at 0 (the constant-0 strategy). ``x``/``y`` pin
    an input instead of superposing it.
    """
    qc = Circuit(5)
    _prepare_input(qc, X, x)
    _prepare_input(qc, Y, y)
    if strategy == "copy":
        qc.h(A)
        qc.cx(A, B)
    elif strategy != "zero":
        raise ValueError(f"unknown strategy {strategy!r}")
    qc.barrier()
    _win_readout(qc)
    return qc


def build_quantum_chsh_circuit(theta: float = math.pi / 4, x: int | None = None, y: int | None = None) -> Circuit:
    """Entangled CHSH strategy: Bell pair on (a, b), CH for Alice, CU3(-/+theta) for Bob."""
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    qc = Circuit(5)
    _prepare_input(qc, X, x)
    _prepare_input(qc, Y, y)
    qc.h(A)
    qc.cx(A, B)
    qc.barrier()
    qc.ch(X, A)
    # y = 0 branch rotates by -theta, y = 1 branch by +theta
    qc.x(Y)
    qc.cu3(-theta, Y, B)
    qc.x(Y)
    qc.cu3(theta, Y, B)
    qc.barrier()
    _win_readout(qc)
    return qc


def circuit_win_probability(qc: Circuit) -> float:
    """Pr[f = 0] read from the reduced density matrix of the f qubit."""
    return qubit_probabilities(run_circuit(qc), F)[0]
