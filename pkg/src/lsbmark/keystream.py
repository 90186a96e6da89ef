"""Key-seeded, bit-exact selection of host pixels.

The secret key is hashed with FNV-1a (64 bit) into a seed, the seed drives a
splitmix64 stream, and the stream drives a partial Fisher-Yates shuffle of the
host pixel indices. Every step uses fixed 64-bit integer arithmetic so two
independent implementations regenerate the same plan from the key alone.

This hides *where* the payload lives; it is not a cryptographic primitive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX_MUL1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL2 = 0x94D049BB133111EB

HEX_PREFIX = "hex:"


class InvalidKeyError(ValueError):
    """Invalid secret key material."""


class CountExceedsDomainError(ValueError):
    """More pixels were requested than the host has."""


@dataclass(frozen=True)
class SecretKey:
    """Non-empty byte string seeding the pixel selection."""

    data: bytes

    def __post_init__(self):
        if not isinstance(self.data, (bytes, bytearray)):
            raise InvalidKeyError("key must be bytes")
        if len(self.data) == 0:
            raise InvalidKeyError("key must be at least one byte long")
        object.__setattr__(self, "data", bytes(self.data))

    @classmethod
    def from_text(cls, text: str) -> "SecretKey":
        """Parse a user-supplied key.

        ``"hex:00ff"`` yields the bytes ``00 ff``; anything else is taken as
        text and encoded as UTF-8 (no normalisation, no trailing newline).
        """
        if text.startswith(HEX_PREFIX):
            digits = text[len(HEX_PREFIX):]
            try:
                raw = bytes.fromhex(digits)
            except ValueError as exc:
                raise InvalidKeyError(f"bad hex key {digits!r}: {exc}") from None
            return cls(raw)
        return cls(text.encode("utf-8"))

    @property
    def seed(self) -> int:
        return seed_from_key(self)

    def fingerprint(self) -> str:
        """First 8 hex digits of the seed; safe to print in reports."""
        return f"{self.seed:016x}"[:8]

    def __repr__(self):
        # never echo key material
        return f"SecretKey(<{len(self.data)} bytes, fp={self.fingerprint()}>)"


def _as_key(key) -> SecretKey:
    if isinstance(key, SecretKey):
        return key
    if isinstance(key, str):
        return SecretKey.from_text(key)
    return SecretKey(key)


def seed_from_key(key) -> int:
    """FNV-1a 64-bit hash of the key bytes."""
    h = FNV_OFFSET_BASIS
    for byte in _as_key(key).data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * SPLITMIX_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * SPLITMIX_MUL2) & MASK64
    return z ^ (z >> 31)


def keyed_stream_next(state: int) -> tuple[int, int]:
    """One splitmix64 step. Returns ``(value, new_state)``."""
    state = (state + SPLITMIX_GAMMA) & MASK64
    return _mix(state), state


def keyed_stream(seed: int, count: int) -> np.ndarray:
    """The first ``count`` splitmix64 outputs for ``seed`` as a uint64 array.

    Equivalent to calling :func:`keyed_stream_next` ``count`` times; the i-th
    state is simply ``seed + (i + 1) * gamma`` so the whole block is computed
    at once with wrapping uint64 arithmetic.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    with np.errstate(over="ignore"):
        steps = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + steps * np.uint64(SPLITMIX_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(SPLITMIX_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(SPLITMIX_MUL2)
        z = z ^ (z >> np.uint64(31))
    return z


@dataclass(frozen=True)
class SelectionPlan:
    """Ordered, distinct host pixel indices derived from a key."""

    domain_size: int
    indices: tuple[int, ...]

    def __len__(self):
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


def _partial_shuffle(seed: int, n: int, k: int) -> np.ndarray:
    randoms = keyed_stream(seed, k)
    # j = i + r mod (n - i); exact in uint64, modulo bias accepted
    spans = np.uint64(n) - np.arange(k, dtype=np.uint64)
    targets = (randoms % spans).astype(np.int64) + np.arange(k)
    # sparse view of the identity array: only touched slots are stored
    moved: dict[int, int] = {}
    picked = []
    for i, j in enumerate(targets.tolist()):
        at_i = moved.get(i, i)
        at_j = moved.get(j, j)
        moved[j] = at_i
        picked.append(at_j)
    return np.asarray(picked, dtype=np.int64)


def derive_permutation(key, domain_size: int, count: int) -> SelectionPlan:
    """Pick ``count`` distinct indices from ``range(domain_size)``.

    Runs the first ``count`` steps of a Fisher-Yates shuffle of the identity
    array; step ``i`` swaps position ``i`` with ``i + next() % (n - i)``. A
    shorter plan for the same key is always a prefix of a longer one.
    """
    if domain_size < 0 or count < 0:
        raise ValueError("domain_size and count must be non-negative")
    if count > domain_size:
        raise CountExceedsDomainError(
            f"cannot select {count} pixels from a domain of {domain_size}"
        )
    seed = seed_from_key(key)
    picked = _partial_shuffle(seed, domain_size, count)
    return SelectionPlan(domain_size, tuple(picked.tolist()))


def plan_indices(key, domain_size: int, count: int) -> np.ndarray:
    """Like :func:`derive_permutation` but returns an int64 array directly."""
    if count > domain_size:
        raise CountExceedsDomainError(
            f"cannot select {count} pixels from a domain of {domain_size}"
        )
    return _partial_shuffle(seed_from_key(key), domain_size, count)
