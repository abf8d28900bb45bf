"""The SIMON block cipher family.

Scalar functions work on Python ints; the ``*_words`` variants operate on
numpy ``uint64`` arrays for bulk sampling.

Bit positions count from the most significant end (bit 0 is the MSB), so
that a left rotation satisfies S^a(x)(j) = x(j+a) with j+a taken mod n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ROTATIONS = (1, 8, 2)

# The five constant sequences of the key schedule, leftmost bit first.
Z_SEQUENCES = (
    "11111010001001010110000111001101111101000100101011000011100110",
    "10001110111110010011000010110101000111011111001001100001011010",
    "10101111011100000011010010011000101000010001111110010110110011",
    "11011011101011000110010111100000010010001010011100110100001111",
    "11010001111001101011011000100000010111000011001010010011101111",
)


@dataclass(frozen=True)
class SimonVariant:
    word_size: int
    key_words: int
    rounds: int
    z_index: int

    @property
    def block_size(self) -> int:
        return 2 * self.word_size

    @property
    def key_size(self) -> int:
        return self.key_words * self.word_size

    @property
    def name(self) -> str:
        return f"{self.block_size}/{self.key_size}"

    @property
    def mask(self) -> int:
        return (1 << self.word_size) - 1


VARIANTS = {
    v.name: v
    for v in (
        SimonVariant(16, 4, 32, 0),
        SimonVariant(24, 3, 36, 0),
        SimonVariant(24, 4, 36, 1),
        SimonVariant(32, 3, 42, 2),
        SimonVariant(32, 4, 44, 3),
        SimonVariant(48, 2, 52, 2),
        SimonVariant(48, 3, 54, 3),
        SimonVariant(64, 2, 68, 2),
        SimonVariant(64, 3, 69, 3),
        SimonVariant(64, 4, 72, 4),
    )
}


def get_variant(name: str) -> SimonVariant:
    try:
        return VARIANTS[name.strip()]
    except KeyError:
        raise ValueError(f"unknown SIMON variant {name!r}; expected one of {', '.join(VARIANTS)}") from None


@dataclass(frozen=True)
class SimonState:
    left: int
    right: int
    round_index: int = 0


@dataclass(frozen=True)
class RoundKeySet:
    keys: tuple[int, ...]
    word_size: int

    def __post_init__(self):
        object.__setattr__(self, "keys", tuple(int(k) for k in self.keys))
        for k in self.keys:
            _check_word(k, self.word_size)

    def __len__(self):
        return len(self.keys)

    def __getitem__(self, i):
        return self.keys[i]


def _check_word(word: int, n: int) -> None:
    if not 0 <= word < (1 << n):
        raise ValueError(f"word {word:#x} does not fit in {n} bits")


def bit_shift(j: int, n: int) -> int:
    """Right-shift amount that brings bit position j down to the LSB."""
    return n - 1 - (j % n)


def bit(word: int, j: int, n: int) -> int:
    return (word >> bit_shift(j, n)) & 1


def rotl(word: int, shift: int, n: int) -> int:
    _check_word(word, n)
    if not 0 <= shift < n:
        raise ValueError(f"shift must be in [0, {n}), got {shift}")
    mask = (1 << n) - 1
    return ((word << shift) | (word >> (n - shift))) & mask


def rotr(word: int, shift: int, n: int) -> int:
    return rotl(word, (n - shift) % n, n)


def f_function(x: int, n: int) -> int:
    a, b, c = (r % n for r in ROTATIONS)
    return (rotl(x, a, n) & rotl(x, b, n)) ^ rotl(x, c, n)


def round_function(state: SimonState, round_key: int, n: int = 16) -> SimonState:
    """One Feistel round: (L, R) -> (R ^ f(L) ^ k, L)."""
    _check_word(state.left, n)
    _check_word(state.right, n)
    _check_word(round_key, n)
    left = state.right ^ f_function(state.left, n) ^ round_key
    return SimonState(left, state.left, state.round_index + 1)


def inverse_round(state: SimonState, round_key: int, n: int = 16) -> SimonState:
    _check_word(state.left, n)
    _check_word(state.right, n)
    _check_word(round_key, n)
    right = state.left ^ f_function(state.right, n) ^ round_key
    return SimonState(state.right, right, state.round_index - 1)


def _as_keyset(keys, n: int | None) -> RoundKeySet:
    if isinstance(keys, RoundKeySet):
        return keys
    if n is None:
        raise ValueError("word size n is required when keys are a plain sequence")
    return RoundKeySet(tuple(keys), n)


def encrypt(
    plaintext: SimonState,
    keys: RoundKeySet | Sequence[int],
    rounds: int | None = None,
    *,
    n: int | None = None,
    trajectory: bool = False,
) -> SimonState | list[SimonState]:
    """Encrypt ``rounds`` rounds (default: all keys).

    With ``trajectory=True`` the full list (L_0,R_0), ..., (L_rounds,R_rounds)
    is returned instead of only the final state.
    """
    ks = _as_keyset(keys, n)
    rounds = len(ks) if rounds is None else rounds
    if rounds < 0 or rounds > len(ks):
        raise ValueError(f"need {rounds} round keys, have {len(ks)}")
    state = plaintext
    path = [state]
    for i in range(rounds):
        state = round_function(state, ks[i], ks.word_size)
        if trajectory:
            path.append(state)
    return path if trajectory else state


def decrypt(
    ciphertext: SimonState,
    keys: RoundKeySet | Sequence[int],
    rounds: int | None = None,
    *,
    n: int | None = None,
) -> SimonState:
    ks = _as_keyset(keys, n)
    rounds = len(ks) if rounds is None else rounds
    if rounds < 0 or rounds > len(ks):
        raise ValueError(f"need {rounds} round keys, have {len(ks)}")
    state = ciphertext
    for i in reversed(range(rounds)):
        state = inverse_round(state, ks[i], ks.word_size)
    return state


def key_schedule(master_key: Sequence[int], variant: SimonVariant) -> RoundKeySet:
    """Expand m master-key words (k_0 first) into ``variant.rounds`` round keys."""
    n, m = variant.word_size, variant.key_words
    if variant not in VARIANTS.values():
        raise ValueError(f"unsupported variant {variant}")
    if len(master_key) != m:
        raise ValueError(f"{variant.name} needs {m} key words, got {len(master_key)}")
    k = [int(w) for w in master_key]
    for w in k:
        _check_word(w, n)
    z = Z_SEQUENCES[variant.z_index]
    c = variant.mask ^ 3
    for i in range(m, variant.rounds):
        tmp = rotr(k[i - 1], 3, n)
        if m == 4:
            tmp ^= k[i - 3]
        tmp ^= rotr(tmp, 1, n)
        k.append(c ^ int(z[(i - m) % 62]) ^ k[i - m] ^ tmp)
    return RoundKeySet(tuple(k), n)


# hex I/O: 0x-prefixed, most significant digit first


def parse_word(text: str, n: int) -> int:
    word = int(text, 16)
    _check_word(word, n)
    return word


def format_word(word: int, n: int) -> str:
    return f"0x{word:0{n // 4}x}"


def parse_key(text: str, variant: SimonVariant) -> list[int]:
    """Split a hex master key into words, k_0 being the least significant."""
    value = int(text, 16)
    if value >> variant.key_size:
        raise ValueError(f"key {text} exceeds {variant.key_size} bits")
    return [(value >> (variant.word_size * i)) & variant.mask for i in range(variant.key_words)]


def parse_block(text: str, variant: SimonVariant) -> SimonState:
    value = int(text, 16)
    if value >> variant.block_size:
        raise ValueError(f"block {text} exceeds {variant.block_size} bits")
    return SimonState(value >> variant.word_size, value & variant.mask)


def format_block(state: SimonState, variant: SimonVariant) -> str:
    n = variant.word_size
    return f"0x{(state.left << n) | state.right:0{variant.block_size // 4}x}"


# vectorized word arithmetic


def rotl_words(words: np.ndarray, shift: int, n: int) -> np.ndarray:
    shift %= n
    words = np.asarray(words, dtype=np.uint64)
    if shift == 0:
        return words.copy()
    mask = np.uint64((1 << n) - 1)
    return ((words << np.uint64(shift)) | (words >> np.uint64(n - shift))) & mask


def f_words(x: np.ndarray, n: int) -> np.ndarray:
    a, b, c = ROTATIONS
    return (rotl_words(x, a, n) & rotl_words(x, b, n)) ^ rotl_words(x, c, n)


def encrypt_words(
    left: np.ndarray, right: np.ndarray, keys: Sequence[int], n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Apply ``len(keys)`` rounds elementwise to word arrays."""
    left = np.asarray(left, dtype=np.uint64)
    right = np.asarray(right, dtype=np.uint64)
    for k in keys:
        left, right = right ^ f_words(left, n) ^ np.uint64(k), left
    return left, right


def bits_of(words: np.ndarray, j: int, n: int) -> np.ndarray:
    return ((np.asarray(words, dtype=np.uint64) >> np.uint64(bit_shift(j, n))) & np.uint64(1)).astype(np.uint8)
