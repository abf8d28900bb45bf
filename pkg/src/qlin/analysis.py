"""Classical statistics on SIMON: empirical bias, key-bit recovery, piling-up."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .simon import RoundKeySet, SimonState, SimonVariant, bit, bit_shift, bits_of, encrypt_words

CHUNK = 1 << 16
MIN_GROUP_SAMPLES = 100


class EmptyEstimateError(ValueError):
    """No sample survived the conditioning filter."""


@dataclass(frozen=True)
class BiasEstimate:
    p0: float
    p1: float
    bias: float
    samples_used: int
    samples_filtered: int
    std_error: float

    @classmethod
    def from_counts(cls, zeros: int, used: int, filtered: int) -> "BiasEstimate":
        if used <= 0:
            raise EmptyEstimateError("no samples satisfied the filter")
        p0 = zeros / used
        p1 = 1.0 - p0
        return cls(p0, p1, p0 - 0.5, used, filtered, math.sqrt(p0 * p1 / used))


def default_workers() -> int:
    env = os.environ.get("QLIN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _condition_l(left: np.ndarray, j: int, n: int) -> np.ndarray:
    """Force L(j+2) := L(j)."""
    p = np.uint64(bit_shift(j + 2, n))
    bj = (left >> np.uint64(bit_shift(j, n))) & np.uint64(1)
    return (left & ~(np.uint64(1) << p)) | (bj << p)


def _bias_chunk(seed: int, index: int, n: int, round_key: int, j: int, condition: str):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    top = (1 << n) - 1
    left = _condition_l(rng.integers(0, top, CHUNK, dtype=np.uint64, endpoint=True), j, n)
    right = rng.integers(0, top, CHUNK, dtype=np.uint64, endpoint=True)
    new_left, _ = encrypt_words(left, right, [round_key], n)
    keep = bits_of(right, j, n) == bit(round_key, j, n)
    if condition == "unequal":
        keep = ~keep
    stat = bits_of(left ^ new_left, j, n)
    return keep, stat


def estimate_bias(
    variant: SimonVariant,
    keys: RoundKeySet,
    bit_j: int,
    samples: int,
    seed: int,
    *,
    condition: str = "equal",
    workers: int | None = None,
) -> BiasEstimate:
    """Monte-Carlo estimate of Pr[L_i(j) ^ L_{i+1}(j) = 0].

    Plaintexts are uniform subject to L(j) = L(j+2); one round is applied
    with ``keys[0]`` and only samples with R(j) = K(j) (``condition="equal"``)
    or R(j) != K(j) (``"unequal"``) are counted, until ``samples`` survive.
    Samples come in fixed-size chunks with per-chunk seeds, so the result
    does not depend on ``workers``.
    """
    n = variant.word_size
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if not 0 <= bit_j < n:
        raise ValueError(f"bit_j must be in [0, {n}), got {bit_j}")
    if condition not in ("equal", "unequal"):
        raise ValueError(f"unknown condition {condition!r}")
    round_key = keys[0]
    workers = workers or default_workers()

    zeros = used = filtered = 0
    next_chunk = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while used < samples:
            # survivors are ~1/2 of draws; over-provision a little
            need = max(1, math.ceil((samples - used) * 2.1 / CHUNK))
            batch = range(next_chunk, next_chunk + need)
            next_chunk += need
            results = pool.map(lambda i: _bias_chunk(seed, i, n, round_key, bit_j, condition), batch)
            for keep, stat in results:
                if used >= samples:
                    break
                survivors = np.flatnonzero(keep)
                take = min(samples - used, len(survivors))
                if used + take < samples:
                    filtered += len(keep) - take
                else:
                    filtered += int(survivors[take - 1]) + 1 - take
                zeros += int(np.count_nonzero(stat[survivors[:take]] == 0))
                used += take
    return BiasEstimate.from_counts(zeros, used, filtered)


def exhaustive_bias(n: int, round_key: int, bit_j: int, *, condition: str = "equal") -> BiasEstimate:
    """Exact bias over all 2^(2n) one-round inputs (use a reduced width such as n = 8)."""
    if n > 12:
        raise ValueError(f"exhaustive enumeration is limited to n <= 12, got {n}")
    words = np.arange(1 << n, dtype=np.uint64)
    left, right = (a.ravel() for a in np.meshgrid(words, words, indexing="ij"))
    new_left, _ = encrypt_words(left, right, [round_key], n)
    mask = bits_of(left, bit_j, n) == bits_of(left, bit_j + 2, n)
    kbit = bit(round_key, bit_j, n)
    same = bits_of(right, bit_j, n) == kbit
    mask &= same if condition == "equal" else ~same
    stat = bits_of(left ^ new_left, bit_j, n)[mask]
    return BiasEstimate.from_counts(int(np.count_nonzero(stat == 0)), int(mask.sum()), int((~mask).sum()))


@dataclass(frozen=True)
class KeyBitVerdict:
    bit_position_j: int
    inferred_key_bit: int | None
    confidence: float
    group_frequencies: tuple[float, float]
    group_sizes: tuple[int, int]

    @property
    def abstained(self) -> bool:
        return self.inferred_key_bit is None


def generate_pairs(
    variant: SimonVariant, keys: RoundKeySet, count: int, seed: int, rounds: int = 2
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Uniform random plaintexts and their ``rounds``-round ciphertexts as word arrays."""
    n = variant.word_size
    rng = np.random.default_rng(seed)
    top = (1 << n) - 1
    pl = rng.integers(0, top, count, dtype=np.uint64, endpoint=True)
    pr = rng.integers(0, top, count, dtype=np.uint64, endpoint=True)
    cl, cr = encrypt_words(pl, pr, keys[:rounds], n)
    return pl, pr, cl, cr


def recover_key_bit_arrays(
    pl: np.ndarray,
    pr: np.ndarray,
    cl: np.ndarray,
    cr: np.ndarray,
    bit_j: int,
    n: int,
    *,
    filter_mode: str = "plaintext",
    min_group: int = MIN_GROUP_SAMPLES,
    z_threshold: float = 3.0,
) -> KeyBitVerdict:
    """Infer K_i(j) from two-round pairs.

    L_{i+1}(j) is read as R_{i+2}(j) off the ciphertext. Pairs pass the
    filter L_i(j) = L_i(j+2) (``filter_mode="plaintext"``) or
    L_i(j) = L_{i+1}(j+2) (``"procedure"``), are split by the observed R_i(j),
    and the key bit is the R value whose group shows Pr[stat = 0] near 3/4.
    """
    lj = bits_of(pl, bit_j, n)
    if filter_mode == "plaintext":
        keep = lj == bits_of(pl, bit_j + 2, n)
    elif filter_mode == "procedure":
        keep = lj == bits_of(cr, bit_j + 2, n)
    else:
        raise ValueError(f"unknown filter_mode {filter_mode!r}")
    stat = lj ^ bits_of(cr, bit_j, n)
    rj = bits_of(pr, bit_j, n)

    sizes, freqs = [], []
    for g in (0, 1):
        sel = keep & (rj == g)
        size = int(sel.sum())
        sizes.append(size)
        freqs.append(float(np.count_nonzero(stat[sel] == 0)) / size if size else float("nan"))
    sizes, freqs = tuple(sizes), tuple(freqs)

    if min(sizes) < min_group:
        return KeyBitVerdict(bit_j, None, 0.0, freqs, sizes)
    # two-proportion z statistic on the frequency gap
    f0, f1 = freqs
    pooled = (f0 * sizes[0] + f1 * sizes[1]) / (sizes[0] + sizes[1])
    se = math.sqrt(max(pooled * (1 - pooled), 1e-300) * (1 / sizes[0] + 1 / sizes[1]))
    z = (f0 - f1) / se
    confidence = math.erf(abs(z) / math.sqrt(2))
    if abs(z) < z_threshold:
        return KeyBitVerdict(bit_j, None, confidence, freqs, sizes)
    return KeyBitVerdict(bit_j, 0 if z > 0 else 1, confidence, freqs, sizes)


def recover_key_bit(
    pairs: Sequence[tuple[SimonState, SimonState]], bit_j: int, n: int = 16, **kwargs
) -> KeyBitVerdict:
    pl = np.fromiter((p.left for p, _ in pairs), dtype=np.uint64, count=len(pairs))
    pr = np.fromiter((p.right for p, _ in pairs), dtype=np.uint64, count=len(pairs))
    cl = np.fromiter((c.left for _, c in pairs), dtype=np.uint64, count=len(pairs))
    cr = np.fromiter((c.right for _, c in pairs), dtype=np.uint64, count=len(pairs))
    return recover_key_bit_arrays(pl, pr, cl, cr, bit_j, n, **kwargs)


@dataclass(frozen=True)
class SampleComplexity:
    """Two sample-count estimates for telling {p, 1-p} from {q, 1-q}.

    ``pq_estimate`` is ceil(1 / (p q^2)); ``bias_estimate`` is the usual
    ceil(1 / (4 eps^2)) with eps = q - p, or None when eps = 0.
    """

    p: float
    q: float
    pq_estimate: int
    bias: float
    bias_estimate: int | None

    @property
    def indistinguishable(self) -> bool:
        return self.bias_estimate is None


def sample_complexity(p: float, q: float) -> SampleComplexity:
    for name, v in (("p", p), ("q", q)):
        if not 0 < v < 1:
            raise ValueError(f"{name} must be in (0, 1), got {v}")
    eps = q - p
    direct = math.ceil(1 / (p * q * q))
    alt = None if eps == 0 else math.ceil(1 / (4 * eps * eps))
    return SampleComplexity(p, q, direct, eps, alt)


def bias_sample_ratio(old_bias: float, new_bias: float) -> float:
    """Factor by which 1/(4 eps^2) shrinks when the bias grows from old to new."""
    return (new_bias / old_bias) ** 2


def _check_biases(biases: Sequence[float]) -> None:
    if not biases:
        raise ValueError("need at least one bias")
    for e in biases:
        if not -0.5 <= e <= 0.5:
            raise ValueError(f"bias {e} outside [-1/2, 1/2]")


def piling_up(biases: Sequence[float]) -> float:
    """Bias of the XOR of independent bits: 2^(k-1) * prod(eps_i)."""
    _check_biases(biases)
    return 2 ** (len(biases) - 1) * math.prod(biases)


def piling_up_oracle(probabilities: Sequence[float], max_k: int = 16) -> float:
    """Exact Pr[XOR = 0] - 1/2 by enumerating all 2^k outcomes."""
    k = len(probabilities)
    if k == 0:
        raise ValueError("need at least one probability")
    if k > max_k:
        raise ValueError(f"k = {k} exceeds max_k = {max_k}")
    for p in probabilities:
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")
    total = 0.0
    for outcome in itertools.product((0, 1), repeat=k):
        if sum(outcome) % 2 == 0:
            total += math.prod(p if b == 0 else 1 - p for p, b in zip(probabilities, outcome))
    return total - 0.5
