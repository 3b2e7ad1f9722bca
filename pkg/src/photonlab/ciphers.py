"""Classical cipher suite: rail fence transposition, the Caesar/ROT13 and
Vigenere substitutions, a rectangle-rule Playfair variant, the
adjacent-pair homophonic cipher, letter-frequency analysis with a Caesar
cracker, and the one-time pad.

Conventions: A-Z alphabet, case preserved where the cipher keeps letters
one-to-one, J merged into I for Playfair only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "rail_fence_encrypt",
    "rail_fence_decrypt",
    "caesar",
    "rot13",
    "vigenere_encrypt",
    "vigenere_decrypt",
    "PlayfairTable",
    "REFERENCE_PLAYFAIR_TABLE",
    "playfair_prepare",
    "playfair_encrypt",
    "playfair_decrypt",
    "homophonic_adjacent_encrypt",
    "homophonic_adjacent_decrypt",
    "frequency_analysis",
    "ENGLISH_LETTER_FREQUENCIES",
    "CaesarCrack",
    "crack_caesar",
    "otp_xor",
]

_ALPHA = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


# ---------------------------------------------------------------------------
# rail fence


def _rail_pattern(n: int, rails: int) -> list[int]:
    # Zigzag row index for each position; the cycle is 2*rails - 2.
    cycle = 2 * rails - 2
    rows = []
    for i in range(n):
        k = i % cycle
        rows.append(k if k < rails else cycle - k)
    return rows


def rail_fence_encrypt(message: str, rails: int) -> str:
    """Write the message in a zigzag over ``rails`` rows, read off row-wise."""
    if rails < 2:
        raise ValueError(f"rail count must be at least 2, got {rails}")
    if not message:
        raise ValueError("message must be non-empty")
    rows = [[] for _ in range(rails)]
    for ch, row in zip(message, _rail_pattern(len(message), rails)):
        rows[row].append(ch)
    return "".join("".join(row) for row in rows)


def rail_fence_decrypt(ciphertext: str, rails: int) -> str:
    if rails < 2:
        raise ValueError(f"rail count must be at least 2, got {rails}")
    if not ciphertext:
        raise ValueError("message must be non-empty")
    pattern = _rail_pattern(len(ciphertext), rails)
    row_lengths = [pattern.count(r) for r in range(rails)]
    rows = []
    pos = 0
    for length in row_lengths:
        rows.append(list(ciphertext[pos : pos + length]))
        pos += length
    cursors = [0] * rails
    out = []
    for row in pattern:
        out.append(rows[row][cursors[row]])
        cursors[row] += 1
    return "".join(out)


# ---------------------------------------------------------------------------
# Caesar / ROT13 / Vigenere


def _shift_letter(ch: str, shift: int) -> str:
    if "a" <= ch <= "z":
        return chr((ord(ch) - ord("a") + shift) % 26 + ord("a"))
    if "A" <= ch <= "Z":
        return chr((ord(ch) - ord("A") + shift) % 26 + ord("A"))
    return ch


def caesar(message: str, shift: int) -> str:
    """Shift letters by ``shift`` positions (negative to decrypt); case and
    non-letters are preserved."""
    return "".join(_shift_letter(ch, shift) for ch in message)


def rot13(message: str) -> str:
    return caesar(message, 13)


def _key_shifts(key: str) -> list[int]:
    shifts = [ord(ch.upper()) - ord("A") for ch in key if ch.isalpha()]
    if not shifts:
        raise ValueError("key must contain at least one letter")
    return shifts


def vigenere_encrypt(message: str, key: str) -> str:
    """Per-letter Caesar shifts taken from the repeating key.

    The key index advances only on plaintext letters; everything else is
    copied verbatim.
    """
    shifts = _key_shifts(key)
    out = []
    k = 0
    for ch in message:
        if ch.isalpha():
            out.append(_shift_letter(ch, shifts[k % len(shifts)]))
            k += 1
        else:
            out.append(ch)
    return "".join(out)


def vigenere_decrypt(ciphertext: str, key: str) -> str:
    shifts = _key_shifts(key)
    out = []
    k = 0
    for ch in ciphertext:
        if ch.isalpha():
            out.append(_shift_letter(ch, -shifts[k % len(shifts)]))
            k += 1
        else:
            out.append(ch)
    return "".join(out)


# ---------------------------------------------------------------------------
# Playfair variant


@dataclass(frozen=True)
class PlayfairTable:
    """5x5 grid of 25 distinct letters (J merged into I)."""

    grid: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.grid) != 5 or any(len(row) != 5 for row in self.grid):
            raise ValueError("table must be 5x5")
        letters = [ch for row in self.grid for ch in row]
        if len(set(letters)) != 25:
            raise ValueError("table must hold 25 distinct letters")
        for ch in letters:
            if ch not in _ALPHA or ch == "J":
                raise ValueError(f"invalid table letter {ch!r}")
        object.__setattr__(
            self,
            "_where",
            {ch: (r, c) for r, row in enumerate(self.grid) for c, ch in enumerate(row)},
        )

    @classmethod
    def from_string(cls, letters: str) -> "PlayfairTable":
        letters = "".join(ch for ch in letters.upper() if ch.isalpha())
        if len(letters) != 25:
            raise ValueError(f"need exactly 25 letters, got {len(letters)}")
        return cls(tuple(tuple(letters[r * 5 : r * 5 + 5]) for r in range(5)))

    def find(self, ch: str) -> tuple[int, int]:
        where = getattr(self, "_where")
        if ch not in where:
            raise ValueError(f"letter {ch!r} is not in the table")
        return where[ch]


REFERENCE_PLAYFAIR_TABLE = PlayfairTable.from_string("QRFIO" "AEVKL" "ZDBMP" "WCNUG" "SXHYT")


def playfair_prepare(message: str) -> str:
    """Normalize to table letters and split-ready digraphs.

    Uppercases, merges J into I, drops non-letters, inserts X between a
    repeated-letter digraph, and pads a trailing odd letter with X.
    """
    letters = [ch for ch in message.upper().replace("J", "I") if ch.isalpha()]
    out = []
    i = 0
    while i < len(letters):
        first = letters[i]
        second = letters[i + 1] if i + 1 < len(letters) else None
        if second is None or second == first:
            out.extend([first, "X"])
            i += 1
        else:
            out.extend([first, second])
            i += 2
    return "".join(out)


def _playfair_digraph(table: PlayfairTable, a: str, b: str) -> tuple[str, str]:
    # Rectangle rule: each letter maps to the corner in the partner's row and
    # its own column; a shared row or column swaps the pair. Self-inverse.
    r1, c1 = table.find(a)
    r2, c2 = table.find(b)
    if r1 == r2 or c1 == c2:
        return b, a
    return table.grid[r2][c1], table.grid[r1][c2]


def playfair_encrypt(message: str, table: PlayfairTable = REFERENCE_PLAYFAIR_TABLE) -> str:
    prepared = playfair_prepare(message)
    out = []
    for i in range(0, len(prepared), 2):
        out.extend(_playfair_digraph(table, prepared[i], prepared[i + 1]))
    return "".join(out)


def playfair_decrypt(ciphertext: str, table: PlayfairTable = REFERENCE_PLAYFAIR_TABLE) -> str:
    """Apply the self-inverse digraph map; X padding is left in place."""
    letters = "".join(ch for ch in ciphertext.upper() if ch.isalpha())
    if len(letters) % 2:
        raise ValueError("ciphertext must contain an even number of letters")
    out = []
    for i in range(0, len(letters), 2):
        out.extend(_playfair_digraph(table, letters[i], letters[i + 1]))
    return "".join(out)


# ---------------------------------------------------------------------------
# homophonic adjacent-pair cipher


def homophonic_adjacent_encrypt(message: str) -> str:
    """Replace each letter with its cyclic (predecessor, successor) pair."""
    out = []
    for ch in message:
        if not ch.isalpha():
            raise ValueError(f"message must contain letters only, got {ch!r}")
        upper = ch.isupper()
        idx = ord(ch.upper()) - ord("A")
        pred = _ALPHA[(idx - 1) % 26]
        succ = _ALPHA[(idx + 1) % 26]
        pair = pred + succ if upper else (pred + succ).lower()
        out.append(pair)
    return "".join(out)


def homophonic_adjacent_decrypt(ciphertext: str) -> str:
    if len(ciphertext) % 2:
        raise ValueError("ciphertext length must be even")
    out = []
    for i in range(0, len(ciphertext), 2):
        a, b = ciphertext[i], ciphertext[i + 1]
        if not (a.isalpha() and b.isalpha()):
            raise ValueError(f"ciphertext must contain letters only, got {a!r}{b!r}")
        upper = a.isupper()
        ia = ord(a.upper()) - ord("A")
        ib = ord(b.upper()) - ord("A")
        if (ia + 2) % 26 != ib:
            raise ValueError(f"pair {a}{b} is not an adjacent-letter pair")
        letter = _ALPHA[(ia + 1) % 26]
        out.append(letter if upper else letter.lower())
    return "".join(out)


# ---------------------------------------------------------------------------
# frequency analysis and Caesar cracking


# Relative letter frequencies of English text.
ENGLISH_LETTER_FREQUENCIES = {
    "A": 0.08167, "B": 0.01492, "C": 0.02782, "D": 0.04253, "E": 0.12702,
    "F": 0.02228, "G": 0.02015, "H": 0.06094, "I": 0.06966, "J": 0.00153,
    "K": 0.00772, "L": 0.04025, "M": 0.02406, "N": 0.06749, "O": 0.07507,
    "P": 0.01929, "Q": 0.00095, "R": 0.05987, "S": 0.06327, "T": 0.09056,
    "U": 0.02758, "V": 0.00978, "W": 0.02360, "X": 0.00150, "Y": 0.01974,
    "Z": 0.00074,
}


def frequency_analysis(message: str) -> dict[str, float]:
    """Normalized letter-frequency table of the message (case-folded)."""
    counts = {ch: 0 for ch in _ALPHA}
    total = 0
    for ch in message.upper():
        if ch in counts:
            counts[ch] += 1
            total += 1
    if total == 0:
        raise ValueError("message contains no letters")
    return {ch: counts[ch] / total for ch in _ALPHA}


@dataclass
class CaesarCrack:
    shift: int
    chi_square_by_shift: list[float]
    low_confidence: bool

    @property
    def chi_square(self) -> float:
        return self.chi_square_by_shift[self.shift]


def crack_caesar(message: str, profile: dict[str, float] | None = None) -> CaesarCrack:
    """Estimate the Caesar encryption shift by chi-square against a language
    profile; flags low confidence when no shift clearly wins."""
    profile = profile or ENGLISH_LETTER_FREQUENCIES
    observed = frequency_analysis(message)
    chi = []
    for shift in range(26):
        # Undo the candidate shift, then compare with the profile.
        total = 0.0
        for k, ch in enumerate(_ALPHA):
            plain = _ALPHA[(k - shift) % 26]
            expected = profile[plain]
            total += (observed[ch] - expected) ** 2 / expected
        chi.append(total)
    best = int(np.argmin(chi))
    median = float(np.median(chi))
    margin = (median - chi[best]) / median if median > 0 else 0.0
    return CaesarCrack(shift=best, chi_square_by_shift=chi, low_confidence=margin < 0.3)


# ---------------------------------------------------------------------------
# one-time pad


def otp_xor(key, message) -> np.ndarray:
    """Bitwise XOR of equal-length bit sequences; applying twice restores."""
    k = np.asarray(key, dtype=np.uint8)
    m = np.asarray(message, dtype=np.uint8)
    if k.size != m.size:
        raise ValueError(f"key/message length mismatch: {k.size} vs {m.size}")
    if (k.size and k.max(initial=0) > 1) or (m.size and m.max(initial=0) > 1):
        raise ValueError("inputs must be bit sequences")
    return np.bitwise_xor(k, m)
