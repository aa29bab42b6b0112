"""Seeded random streams shared by the compiled and pure-Python engines.

Every run owns one ``numpy.random.PCG64`` stream seeded through
``SeedSequence(seed)``.  The engines never call numpy's distribution
samplers; they consume raw 64-bit outputs with three fixed conversions, so
both backends read the same draws in the same order and produce identical
runs:

* random bit:      ``raw >> 63``
* uniform [0, 1):  ``(raw >> 11) * 2**-53``
* index below c:   ``((raw >> 32) * c) >> 32``   (c < 2**32)
"""
import numpy as np

RNG_NAME = "PCG64(SeedSequence(seed)); raw-uint64 draws"

_TWO_M53 = 2.0 ** -53
_SHIFT11 = np.uint64(11)
_SHIFT63 = np.uint64(63)


def bit_generator(seed: int) -> np.random.PCG64:
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.PCG64(np.random.SeedSequence(seed))


class RawStream:
    """Buffered reader of raw uint64 draws from a bit generator."""

    def __init__(self, bitgen: np.random.BitGenerator, block: int = 4096):
        self.bitgen = bitgen
        self.block = block
        self._buf = np.empty(0, dtype=np.uint64)
        self._pos = 0

    def take(self, count: int) -> np.ndarray:
        if self._pos + count > self._buf.shape[0]:
            rest = self._buf[self._pos:]
            fresh = self.bitgen.random_raw(max(self.block, count))
            self._buf = np.concatenate([rest, fresh])
            self._pos = 0
        out = self._buf[self._pos:self._pos + count]
        self._pos += count
        return out

    def next(self) -> int:
        return int(self.take(1)[0])


def uniforms(raw: np.ndarray) -> np.ndarray:
    return (raw >> _SHIFT11).astype(np.float64) * _TWO_M53


def random_bits(raw: np.ndarray) -> np.ndarray:
    return (raw >> _SHIFT63).astype(bool)


def index_below(raw: int, count: int) -> int:
    return ((raw >> 32) * count) >> 32
