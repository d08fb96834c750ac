"""Seeded, splittable random variate generation.

All randomness in the package flows through :class:`RandomStream`, a thin
value-like wrapper over numpy's PCG64 bit generator keyed by a 64-bit seed
plus a tuple of substream indices (numpy ``SeedSequence`` spawn keys).  The
variate tape produced by a stream is a pure function of
``(seed, substream indices, draw count)``, so replicates can be farmed out
to any number of workers and still reproduce bit-identically.
"""

from __future__ import annotations

import numpy as np

_MAX_UINT64 = 2**64 - 1


def _check_uint64(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if not 0 <= value <= _MAX_UINT64:
        raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {value}")
    return value


class RandomStream:
    """One independent variate stream identified by (seed, key path).

    The underlying generator is ``PCG64(SeedSequence(seed, spawn_key=key))``.
    SeedSequence's hash mixing gives avalanche behavior over both seed and
    key, so nearby (seed, index) pairs yield unrelated streams.  A stream is
    stateful (draws advance it) and must not be shared across concurrent
    consumers; derive substreams instead.
    """

    __slots__ = ("seed", "key", "_gen")

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = _check_uint64(seed, "seed")
        self.key = tuple(_check_uint64(k, "substream index") for k in key)
        self._gen = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def substream(self, index: int) -> "RandomStream":
        """Fresh independent stream at ``key + (index,)``, unaffected by draws made here."""
        return RandomStream(self.seed, self.key + (index,))

    def gaussian(self) -> float:
        """One standard normal variate."""
        return float(self.generator.standard_normal())

    def gaussians(self, size: int) -> np.ndarray:
        """``size`` standard normal variates in tape order."""
        return self.generator.standard_normal(size)

    def chi(self, alpha: float) -> float:
        """One chi variate with E[chi^2] = alpha; see :func:`chi`."""
        return chi(self, alpha)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RandomStream(seed={self.seed}, key={self.key})"


def split_stream(seed: int, index: int) -> RandomStream:
    """Deterministic substream ``index`` of the master ``seed``.

    Distinct indices give streams with no shared prefix; identical
    (seed, index) pairs replay the identical tape on any platform.
    """
    return RandomStream(seed, (index,))


def gaussian(stream: RandomStream) -> float:
    """One standard normal variate, advancing the stream."""
    return stream.gaussian()


def chi(stream: RandomStream, alpha: float) -> float:
    """One chi_alpha variate in the convention E[chi_alpha^2] = alpha.

    Sampled as sqrt of a gamma variate with shape alpha/2 and scale 2
    (correct for all alpha > 0 including shape < 1).  alpha = 0 denotes the
    degenerate variate identically zero and consumes no tape.
    """
    if alpha < 0:
        raise ValueError(f"chi parameter must be nonnegative, got {alpha}")
    if alpha == 0:
        return 0.0
    return float(np.sqrt(2.0 * stream.generator.standard_gamma(0.5 * alpha)))
