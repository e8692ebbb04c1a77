"""Deterministic, stateless randomness keyed by seed, path, and purpose.

Every random quantity in the estimator and the compiler is a pure function of
(seed, theta path, kind tag, block counter): the message is hashed with keyed
BLAKE2b, the 64-byte digest is split into eight 64-bit lanes, and each lane k
becomes the uniform (k + 0.5) * 2**-64 in the open interval (0, 1). Gaussians
are produced by the inverse normal CDF (this choice is fixed; swapping in a
different transform would silently change every sampled path).

Theta paths are tuples of 64-bit signed integers; the canonical encoding is a
little-endian uint64 length prefix followed by each entry as a little-endian
two's-complement int64. The root path is the single entry 0.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Iterable

import numpy as np
from scipy.special import ndtri

ThetaPath = tuple[int, ...]

KIND_TIME = b"T"
KIND_GAUSS = b"W"
KIND_BOX = b"B"
KIND_PROBE = b"P"

_TWO64 = float(2**64)
_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


def theta_bytes(theta: ThetaPath) -> bytes:
    """Canonical byte encoding of a theta path."""
    parts = [struct.pack("<Q", len(theta))]
    for entry in theta:
        if not isinstance(entry, (int, np.integer)):
            raise ValueError(f"theta entries must be integers, got {type(entry).__name__}")
        entry = int(entry)
        if entry < _INT64_MIN or entry > _INT64_MAX:
            raise ValueError(f"theta entry {entry} does not fit in 64 bits")
        parts.append(struct.pack("<q", entry))
    return b"".join(parts)


class RandomOracle:
    """Counter-based random field over theta paths for one seed and dimension."""

    def __init__(self, seed: int, d: int) -> None:
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.seed = int(seed)
        self.d = int(d)
        self._key = struct.pack("<q", self._mask(seed))

    @staticmethod
    def _mask(seed: int) -> int:
        # wrap arbitrary python ints into signed 64-bit range
        return ((int(seed) + 2**63) % 2**64) - 2**63

    def uniform01(self, theta: ThetaPath, kind: bytes, count: int) -> np.ndarray:
        """`count` uniforms in (0, 1), eight per digest block."""
        if count < 0:
            raise ValueError("count must be >= 0")
        prefix = theta_bytes(theta) + kind
        blocks = []
        for block_index in range((count + 7) // 8):
            h = hashlib.blake2b(
                prefix + struct.pack("<Q", block_index), digest_size=64, key=self._key
            )
            blocks.append(np.frombuffer(h.digest(), dtype="<u8"))
        if not blocks:
            return np.zeros(0)
        lanes = np.concatenate(blocks)[:count]
        return (lanes.astype(np.float64) + 0.5) / _TWO64

    def gaussians(self, theta: ThetaPath, count: int) -> np.ndarray:
        """Standard normals via the inverse CDF of per-lane uniforms."""
        return ndtri(self.uniform01(theta, KIND_GAUSS, count))


def uniform_time(oracle: RandomOracle, theta: ThetaPath, t: float, horizon: float) -> float:
    """One time drawn uniformly from [t, horizon], keyed by the theta path."""
    if not t <= horizon:
        raise ValueError(f"need t <= horizon, got t={t}, horizon={horizon}")
    u = float(oracle.uniform01(theta, KIND_TIME, 1)[0])
    return t + (horizon - t) * u


def brownian_increment(oracle: RandomOracle, theta: ThetaPath, s: float) -> np.ndarray:
    """Brownian displacement over elapsed time s >= 0: sqrt(s) times the path's
    fixed Gaussian vector, so the same theta at two times gives collinear draws."""
    if s < 0:
        raise ValueError(f"elapsed time must be >= 0, got {s}")
    return np.sqrt(s) * oracle.gaussians(theta, oracle.d)


def box_point(oracle: RandomOracle, index: int, low: float, high: float) -> np.ndarray:
    """Point `index` of the uniform stream on the box [low, high]^d."""
    if not low < high:
        raise ValueError("box needs low < high")
    u = oracle.uniform01((int(index),), KIND_BOX, oracle.d)
    return low + (high - low) * u


def box_points(oracle: RandomOracle, count: int, low: float, high: float) -> np.ndarray:
    """The first `count` points of the uniform box stream, shape (count, d)."""
    return np.stack([box_point(oracle, i, low, high) for i in range(count)]) if count else np.zeros((0, oracle.d))


def probe_point(oracle: RandomOracle, index: int, low: float, high: float) -> np.ndarray:
    """Like box_point but on a stream reserved for equivalence probes."""
    if not low < high:
        raise ValueError("probe box needs low < high")
    u = oracle.uniform01((int(index),), KIND_PROBE, oracle.d)
    return low + (high - low) * u
