"""Print every reproduced number side by side with its reference value."""

import math

from qlin import analysis, chsh, qlinapprox
from qlin.simon import get_variant, key_schedule

ROWS = []


def row(label, value, reference):
    ROWS.append((label, value, reference))


def main():
    _, best = chsh.best_classical_strategy()
    row("classical CHSH, best deterministic strategy", best, 0.75)
    row("classical CHSH circuit, Pr[f=0]", chsh.circuit_win_probability(chsh.build_classical_chsh_circuit()), 0.75)
    row("quantum CHSH circuit, Pr[f=0]", chsh.circuit_win_probability(chsh.build_quantum_chsh_circuit()), 0.85355339)

    out = qlinapprox.output_probabilities
    row("quantum round, Pr[r0=0]", out(qlinapprox.build_quantum_round_circuit(), 3)[0], 0.5)
    row("linear approximation, Pr[r=0]", out(qlinapprox.build_linear_approx_circuit())[0], 0.75)
    row("modified approximation, Pr[r=0]", out(qlinapprox.build_modified_circuit())[0], 0.85355339)
    theta, h = qlinapprox.optimize_theta(0, math.pi / 2, 1e-10)
    row("argmax h(theta)", theta, math.pi / 4)
    row("max h(theta)", h, 2 * math.cos(math.pi / 8) ** 2)

    v = get_variant("32/64")
    keys = key_schedule([0x0100, 0x0908, 0x1110, 0x1918], v)
    est = analysis.estimate_bias(v, keys, 0, 10**6, seed=0)
    row("SIMON32 Monte-Carlo Pr[stat=0], 1e6 samples", est.p0, 0.75)
    row("reduced-width exhaustive Pr[stat=0]", analysis.exhaustive_bias(8, 0x3C, 0).p0, 0.75)
    row("piling-up, two rounds at bias 1/4", analysis.piling_up([0.25, 0.25]), 0.125)
    improved = out(qlinapprox.build_modified_circuit())[0] - 0.5
    row("piling-up, two rounds at improved bias", analysis.piling_up([improved, improved]), 0.25)
    row("1/(4 eps^2) sample ratio, 0.25 -> improved", analysis.bias_sample_ratio(0.25, improved), 2.0)

    width = max(len(r[0]) for r in ROWS)
    for label, value, reference in ROWS:
        print(f"{label:<{width}}  {value:.10f}  (ref {reference:.8g})")


if __name__ == "__main__":
    main()
