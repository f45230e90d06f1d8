"""Deterministic sample streams for verification runs.

Random numbers come from SplitMix64 (Steele, Lea and Flood, 2014), a
published 64-bit mixing generator whose output depends only on the seed,
so streams are identical across platforms and numpy versions.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput
from .manifold import TangentPoint, gram_schmidt

MASK64 = (1 << 64) - 1
MAX_ATTEMPTS = 1000
MIN_FIBRE_NORM = 1e-3


class SplitMix64:
    """The SplitMix64 generator.

    Examples
    --------
    >>> SplitMix64(0).next_u64()
    16294208416658607535
    """

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self):
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo, hi):
        return lo + (hi - lo) * self.random()

    def vector(self, bounds):
        return np.array([self.uniform(lo, hi) for lo, hi in bounds])


@dataclass(frozen=True)
class Sample:
    """One verification sample.

    Attributes
    ----------
    index : int
    tp : TangentPoint
    frame : tuple of ndarray
        G(x)-orthonormal basis of the base tangent space.
    vectors : tuple of ndarray
        Three generic base vectors X, Y, Z.
    """

    index: int
    tp: TangentPoint
    frame: tuple
    vectors: tuple

    def descriptor(self):
        return {"index": self.index, **self.tp.as_dict(),
                "frame": [e.tolist() for e in self.frame],
                "vectors": [v.tolist() for v in self.vectors]}


def _draw(rng, M, index):
    m = M.m
    cube = [(-1.0, 1.0)] * m
    x = rng.vector(M.box)
    u = rng.vector(cube)
    raw = [rng.vector(cube) for _ in range(m)]
    vecs = tuple(rng.vector(cube) for _ in range(3))
    g = M.metric(x)
    if float(u @ g @ u) < MIN_FIBRE_NORM ** 2:
        raise DegenerateInput("fibre vector too short")
    frame = tuple(gram_schmidt(M, x, raw, pivot=1e-6))
    return Sample(index, TangentPoint(x, u), frame, vecs)


def sample_stream(seed, M, n):
    """Yield ``n`` samples for manifold ``M`` from the given seed.

    Degenerate draws (nearly dependent frame seeds, very short fibre
    vectors) are discarded and redrawn; more than 1000 consecutive
    rejections raise :class:`DegenerateInput`.
    """
    rng = SplitMix64(seed)
    for index in range(n):
        for _ in range(MAX_ATTEMPTS):
            try:
                yield _draw(rng, M, index)
                break
            except DegenerateInput:
                continue
        else:
            raise DegenerateInput(f"could not draw a non-degenerate sample after {MAX_ATTEMPTS} attempts")


def samples(seed, M, n):
    return list(sample_stream(seed, M, n))
