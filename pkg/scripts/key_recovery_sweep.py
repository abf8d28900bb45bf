"""Key-bit recovery accuracy against the number of two-round pairs.

For each pair budget, plant random SIMON32/64 keys, try to recover one
round-key bit, and report how often the verdict is right, wrong or abstains.
"""

import argparse

import numpy as np

from qlin import analysis
from qlin.simon import bit, get_variant, key_schedule


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--bit", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budgets", default="200,400,800,2000,10000")
    args = ap.parse_args()

    v = get_variant("32/64")
    rng = np.random.default_rng(args.seed)
    print("pairs,correct,wrong,abstain")
    for budget in (int(b) for b in args.budgets.split(",")):
        tally = {"correct": 0, "wrong": 0, "abstain": 0}
        for t in range(args.trials):
            keys = key_schedule([int(w) for w in rng.integers(0, 1 << 16, 4)], v)
            pairs = analysis.generate_pairs(v, keys, budget, seed=int(rng.integers(1 << 31)))
            verdict = analysis.recover_key_bit_arrays(*pairs, args.bit, v.word_size)
            if verdict.abstained:
                tally["abstain"] += 1
            elif verdict.inferred_key_bit == bit(keys[0], args.bit, 16):
                tally["correct"] += 1
            else:
                tally["wrong"] += 1
        print(f"{budget},{tally['correct']},{tally['wrong']},{tally['abstain']}")


if __name__ == "__main__":
    main()
