"""Quantum SIMON round and the CHSH-modified linear approximation.

Register layout follows the published qiskit listing: q0..q3 hold
L(j), L(j+1), L(j+2), L(j+8) on qubits 0..3, r = R(j) on qubit 4 and
k = K(j) on qubit 5. The statistic L_i(j) XOR L_{i+1}(j) ends up on r.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping

import mpmath
import numpy as np

from .qsim import Circuit, qubit_probabilities, run_circuit

Q0, Q1, Q2, Q3, R, K = range(6)
DEFAULT_THETA = math.pi / 4
INV_PHI = (math.sqrt(5) - 1) / 2

SWEEP_COLUMNS = ("theta", "p0_case00", "p0_case01", "p0_case10", "p0_case11", "p0_aggregate", "h_theta")


@dataclass(frozen=True)
class ApproxCircuitConfig:
    theta: float = DEFAULT_THETA
    constrain_l_equal: bool = True
    constrain_r_equal_k: bool = True
    modified: bool = False

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        if self.modified and not (self.constrain_l_equal and self.constrain_r_equal_k):
            raise ValueError("the modified circuit assumes both constraints")


@dataclass(frozen=True)
class CaseProbability:
    q1: int
    q3: int
    formula_p0: float
    simulated_p0: float


def _prepare(qc: Circuit, q: int, fixed: Mapping[int, int]) -> None:
    if q in fixed:
        if fixed[q]:
            qc.x(q)
    else:
        qc.h(q)


def build_quantum_round_circuit(inputs: Mapping[int, int] | None = None) -> Circuit:
    """Unconstrained single-bit round update on 5 qubits.

    Qubits: l0 = L(j+2), l1 = L(j+1), l2 = L(j+8), r0 = R(j), k0 = K(j).
    ``inputs`` pins qubits to basis values instead of superposing them.
    """
    fixed = dict(inputs or {})
    qc = Circuit(5)
    for q in range(5):
        _prepare(qc, q, fixed)
    qc.barrier()
    qc.ccx(1, 2, 3)
    qc.cx(0, 3)
    qc.cx(4, 3)
    return qc


def build_approx_circuit(config: ApproxCircuitConfig, fixed: Mapping[int, int] | None = None) -> Circuit:
    fixed = dict(fixed or {})
    qc = Circuit(6)
    _prepare(qc, Q0, fixed)
    _prepare(qc, Q1, fixed)
    if config.constrain_l_equal:
        qc.cx(Q0, Q2)
    else:
        _prepare(qc, Q2, fixed)
    _prepare(qc, Q3, fixed)
    _prepare(qc, R, fixed)
    if config.constrain_r_equal_k:
        qc.cx(R, K)
    else:
        _prepare(qc, K, fixed)
    qc.barrier()
    if config.modified:
        qc.ch(Q1, R)
        qc.x(Q3)
        qc.cu3(-config.theta, Q3, K)
        qc.x(Q3)
        qc.cu3(config.theta, Q3, K)
    qc.ccx(Q1, Q3, R)
    qc.cx(Q2, R)
    qc.cx(K, R)
    qc.barrier()
    qc.cx(Q0, R)
    return qc


def build_linear_approx_circuit(fixed: Mapping[int, int] | None = None) -> Circuit:
    return build_approx_circuit(ApproxCircuitConfig(), fixed)


def build_modified_circuit(theta: float = DEFAULT_THETA, fixed: Mapping[int, int] | None = None) -> Circuit:
    return build_approx_circuit(ApproxCircuitConfig(theta=theta, modified=True), fixed)


def output_probabilities(qc: Circuit, qubit: int = R) -> tuple[float, float]:
    return qubit_probabilities(run_circuit(qc), qubit)


def case_probability(q1: int, q3: int, theta: float) -> float:
    """Closed-form Pr(r = 0) with L(j+1) = q1 and L(j+8) = q3 fixed."""
    if q1 not in (0, 1) or q3 not in (0, 1):
        raise ValueError("q1 and q3 must be bits")
    if q1 == 0:
        return math.cos(theta / 2) ** 2
    return (1 + math.sin(theta)) / 2


def simulate_case(q1: int, q3: int, theta: float) -> float:
    return output_probabilities(build_modified_circuit(theta, fixed={Q1: q1, Q3: q3}))[0]


def case_table(theta: float) -> list[CaseProbability]:
    return [
        CaseProbability(q1, q3, case_probability(q1, q3, theta), simulate_case(q1, q3, theta))
        for q1 in (0, 1)
        for q3 in (0, 1)
    ]


def objective_h(theta: float) -> float:
    return math.cos(theta / 2) ** 2 + (1 + math.sin(theta)) / 2


def _objective_h_mp(theta) -> mpmath.mpf:
    return mpmath.cos(theta / 2) ** 2 + (1 + mpmath.sin(theta)) / 2


def golden_section_max(f, lo, hi, tol: float):
    """Shrink [lo, hi] around the maximum of a unimodal ``f`` until narrower than ``tol``.

    Returns the midpoint of the final bracket.
    """
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2


def optimize_theta(lo: float = 0.0, hi: float = math.pi / 2, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section maximisation of h over [lo, hi].

    h is flat to within one double ulp for |theta - theta*| < ~2e-8, so the
    comparisons are done on a 40-digit evaluation of h.
    """
    with mpmath.workdps(40):
        theta = golden_section_max(_objective_h_mp, mpmath.mpf(lo), mpmath.mpf(hi), tol)
        theta = float(theta)
    return theta, objective_h(theta)


def theta_sweep(lo: float, hi: float, steps: int) -> list[dict[str, float]]:
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if not lo < hi:
        raise ValueError(f"need from < to, got [{lo}, {hi}]")
    rows = []
    for theta in np.linspace(lo, hi, steps):
        theta = float(theta)
        row = {"theta": theta}
        for q1 in (0, 1):
            for q3 in (0, 1):
                row[f"p0_case{q1}{q3}"] = simulate_case(q1, q3, theta)
        row["p0_aggregate"] = output_probabilities(build_modified_circuit(theta))[0]
        row["h_theta"] = objective_h(theta)
        rows.append(row)
    return rows


def sweep_to_csv(rows: list[dict[str, float]], stream: io.TextIOBase | None = None) -> str:
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([f"{row[c]:.12g}" for c in SWEEP_COLUMNS])
    return out.getvalue() if stream is None else ""
