"""BB84 protocol engine with channel and eavesdropper models, sifting and
QBER estimation, and the XOR trusted-node key relay.

Qubit encoding: bit x in basis y, with y=0 rectilinear {H, V} and y=1
diagonal {D, A}. Lost qubits are flagged rather than producing clicks;
detector realism lives in the photon-statistics module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .qstate import KET_A, KET_D, KET_H, KET_V

__all__ = [
    "ChannelSpec",
    "EveStrategy",
    "SessionResult",
    "encode_qubit",
    "measure_qubit",
    "bb84_run",
    "sift",
    "qber",
    "relay_encode",
    "relay_decode",
    "bits_to_hex",
    "hex_to_bits",
]


@dataclass(frozen=True)
class ChannelSpec:
    """Lossy, depolarizing quantum channel."""

    loss_probability: float = 0.0
    depolarizing_probability: float = 0.0

    def __post_init__(self):
        for name in ("loss_probability", "depolarizing_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


class EveStrategy(Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept-resend"


@dataclass
class SessionResult:
    n_sent: int
    n_received: int
    n_sifted: int
    sifted_alice: np.ndarray
    sifted_bob: np.ndarray
    qber: float


_STATES = {(0, 0): KET_H, (1, 0): KET_V, (0, 1): KET_D, (1, 1): KET_A}


def encode_qubit(x: int, y: int) -> np.ndarray:
    """Polarization ket for bit x in basis y."""
    if x not in (0, 1) or y not in (0, 1):
        raise ValueError(f"bits must be 0 or 1, got x={x}, y={y}")
    return _STATES[(x, y)].copy()


def measure_qubit(state: np.ndarray, basis: int, rng: np.random.Generator) -> int:
    """Born-rule measurement in the rectilinear (0) or diagonal (1) basis."""
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (2,):
        raise ValueError(f"single-qubit state required, got shape {psi.shape}")
    if basis not in (0, 1):
        raise ValueError(f"basis must be 0 or 1, got {basis}")
    zero_ket = KET_H if basis == 0 else KET_D
    p0 = abs(np.vdot(zero_ket, psi)) ** 2
    return 0 if rng.random() < p0 else 1


def _as_bits(arr, name: str) -> np.ndarray:
    bits = np.asarray(arr, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if bits.size and int(bits.max(initial=0)) > 1:
        raise ValueError(f"{name} must contain only 0/1")
    return bits


def bb84_run(
    n: int,
    channel: ChannelSpec,
    eve: EveStrategy,
    seed: int,
    x_bits=None,
    y_bits=None,
    bob_bases=None,
) -> SessionResult:
    """One full BB84 session.

    Alice draws bit and basis strings (or replays injected ones), encodes,
    the optional intercept-resend eavesdropper measures in a random basis
    and re-sends her outcome's eigenstate, the channel applies loss and
    depolarization, Bob measures in random bases, and matching-basis rounds
    among the received qubits form the sifted keys. Deterministic per seed.

    The per-round quantum mechanics collapses to exact bit rules: a
    measurement in the preparation basis reproduces the prepared bit, and a
    measurement in the conjugate basis (or of a depolarized qubit) is a fair
    coin; both follow from the Born rule for the four protocol states.
    """
    if n < 1:
        raise ValueError("round count must be positive")
    rng = np.random.default_rng(seed)
    x = _as_bits(x_bits, "x_bits") if x_bits is not None else rng.integers(0, 2, n, dtype=np.uint8)
    y = _as_bits(y_bits, "y_bits") if y_bits is not None else rng.integers(0, 2, n, dtype=np.uint8)
    if x.size != n or y.size != n:
        raise ValueError("injected strings must have length n")

    bit = x.copy()
    basis = y.copy()
    if eve is EveStrategy.INTERCEPT_RESEND:
        eve_basis = rng.integers(0, 2, n, dtype=np.uint8)
        eve_coin = rng.integers(0, 2, n, dtype=np.uint8)
        mismatch = eve_basis != basis
        eve_outcome = np.where(mismatch, eve_coin, bit).astype(np.uint8)
        bit = eve_outcome
        basis = eve_basis

    depolarized = rng.random(n) < channel.depolarizing_probability
    received = rng.random(n) >= channel.loss_probability

    y_prime = (
        _as_bits(bob_bases, "bob_bases")
        if bob_bases is not None
        else rng.integers(0, 2, n, dtype=np.uint8)
    )
    if y_prime.size != n:
        raise ValueError("injected strings must have length n")
    coin = rng.integers(0, 2, n, dtype=np.uint8)
    deterministic = (y_prime == basis) & ~depolarized
    outcomes = np.where(deterministic, bit, coin).astype(np.uint8)

    sifted_idx = sift(y, y_prime, received)
    sifted_alice = x[sifted_idx]
    sifted_bob = outcomes[sifted_idx]
    return SessionResult(
        n_sent=n,
        n_received=int(np.count_nonzero(received)),
        n_sifted=int(sifted_idx.size),
        sifted_alice=sifted_alice,
        sifted_bob=sifted_bob,
        qber=qber(sifted_alice, sifted_bob),
    )


def sift(y, y_prime, received_mask) -> np.ndarray:
    """Indices of received rounds where preparation and measurement bases agree."""
    y = _as_bits(y, "y")
    yp = _as_bits(y_prime, "y_prime")
    if y.size != yp.size:
        raise ValueError(f"basis strings differ in length: {y.size} vs {yp.size}")
    mask = np.asarray(received_mask, dtype=bool)
    if mask.size != y.size:
        raise ValueError("received mask length mismatch")
    return np.flatnonzero((y == yp) & mask)


def qber(a, b) -> float:
    """Mismatch fraction of two equal-length sifted keys; 0 for empty keys."""
    a = _as_bits(a, "a")
    b = _as_bits(b, "b")
    if a.size != b.size:
        raise ValueError(f"key length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    return float(np.count_nonzero(a != b)) / a.size


def relay_encode(k_a, k_b) -> np.ndarray:
    """Trusted-node relay word k_AB = k_A XOR k_B (one-time-pad encryption)."""
    a = _as_bits(k_a, "k_a")
    b = _as_bits(k_b, "k_b")
    if a.size != b.size:
        raise ValueError(f"key length mismatch: {a.size} vs {b.size}")
    return np.bitwise_xor(a, b)


def relay_decode(k_ab, k_b) -> np.ndarray:
    """Recover k_A from the relay word: XOR with k_B is self-inverse."""
    return relay_encode(k_ab, k_b)


def bits_to_hex(bits) -> str:
    """Hex encoding of a bit string, most-significant bit first, zero-padded."""
    b = _as_bits(bits, "bits")
    if b.size == 0:
        return ""
    padded = np.concatenate([b, np.zeros((-b.size) % 4, dtype=np.uint8)])
    nibbles = padded.reshape(-1, 4) @ np.array([8, 4, 2, 1], dtype=np.uint8)
    return "".join(f"{v:x}" for v in nibbles)


def hex_to_bits(text: str, n_bits: int | None = None) -> np.ndarray:
    """Inverse of bits_to_hex; ``n_bits`` trims the zero padding."""
    bits = []
    for ch in text:
        value = int(ch, 16)
        bits.extend((value >> k) & 1 for k in (3, 2, 1, 0))
    out = np.array(bits, dtype=np.uint8)
    return out[:n_bits] if n_bits is not None else out
