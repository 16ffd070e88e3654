"""Counter-based SplitMix64 stream.

Output ``i`` of a stream keyed by ``k`` is ``mix(k + (i + 1) * GAMMA)`` with
all arithmetic modulo 2**64, where::

    GAMMA = 0x9E3779B97F4A7C15
    mix(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

The key of stream ``s`` under seed ``seed`` is ``mix(seed ^ mix(s + 1))``.
Uniform doubles take the top 53 bits: ``(z >> 11) * 2**-53`` lies in [0, 1).
Normals use Box-Muller on consecutive pairs ``(u1, u2)`` with
``u1 = ((z1 >> 11) + 1) * 2**-53`` in (0, 1], giving ``r cos(2 pi u2)`` and
``r sin(2 pi u2)`` with ``r = sqrt(-2 ln u1)``.  Both outputs are used.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "splitmix64-ctr-v1"

_MASK = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 2.0 ** -53


def _mix(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def mix64(value: int) -> int:
    """Scalar SplitMix64 finalizer on a Python int."""
    return int(_mix(np.array([value & _MASK], dtype=np.uint64))[0])


def stream_key(seed: int, stream: int) -> int:
    return mix64((seed & _MASK) ^ mix64(stream + 1))


class CounterRNG:
    """Deterministic stream of 64-bit words indexed by a counter.

    The state is only the counter, so two generators built from the same
    ``(seed, stream)`` produce identical output on every platform with IEEE
    doubles.
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or seed > _MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.stream = stream
        self._key = np.uint64(stream_key(seed, stream))
        self.counter = 0

    def words(self, k: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + k + 1, dtype=np.uint64)
        self.counter += k
        return _mix(self._key + idx * _GAMMA)

    def uniform(self, k: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        u = (self.words(k) >> np.uint64(11)).astype(np.float64) * _TWO_M53
        return lo + (hi - lo) * u

    def normal(self, k: int) -> np.ndarray:
        m = (k + 1) // 2
        w = self.words(2 * m)
        u1 = ((w[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53
        u2 = (w[1::2] >> np.uint64(11)).astype(np.float64) * _TWO_M53
        r = np.sqrt(-2.0 * np.log(u1))
        ang = 2.0 * np.pi * u2
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(ang)
        out[1::2] = r * np.sin(ang)
        return out[:k]

    def complex_normal(self, shape) -> np.ndarray:
        """Standard complex Gaussian entries (E|z|^2 = 1)."""
        size = int(np.prod(shape))
        z = self.normal(2 * size).reshape(size, 2)
        return ((z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)).reshape(shape)
