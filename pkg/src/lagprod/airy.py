"""Reference Tracy-Widom(beta) samples from the stochastic Airy operator.

The operator -d^2/dx^2 + x + (2/sqrt(beta)) B'(x) on [0, L] with a Dirichlet
condition at 0 is discretized on a uniform mesh of step h:

    A[k,k]   = 2/h^2 + x_k + (2/sqrt(beta)) g_k / sqrt(h),   x_k = k h,
    A[k,k+1] = -1/h^2,

with g_k i.i.d. standard normal (the integrated white noise over cell k,
scaled to unit variance).  Minus the smallest eigenvalue of A is one
Tracy-Widom(beta) sample.  beta = inf is allowed and drops the noise term,
exposing the deterministic ground state 2.3381... of the Airy operator.

The cell noise is realized by summing a fixed micro-mesh Brownian tape, so
runs at different h (or L) from the same stream share one underlying noise
path; mesh-refinement comparisons then see pure discretization bias instead
of independent sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eig import EigConfig, tridiag_extreme_eig
from .ensemble import SymmetricTridiagonal
from .stats import SampleBatch
from .variates import RandomStream, split_stream

# Micro-mesh used to realize the Brownian tape; each cell of width h sums
# about h/MICRO_STEP micro-increments (exactly standard normal after
# scaling, for any h).
MICRO_STEP = 0.005

DEFAULT_MESH = 0.02
DEFAULT_CUTOFF = 12.0


@dataclass(frozen=True)
class AiryDiscretization:
    """Mesh step h, domain cutoff L, and noise parameter beta (inf = noiseless)."""

    beta: float
    h: float = DEFAULT_MESH
    L: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if not self.beta > 0:  # math.inf passes
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0 < self.h <= 0.1:
            raise ValueError(f"mesh step must lie in (0, 0.1], got {self.h}")
        if self.L < 8:
            raise ValueError(f"domain cutoff must be >= 8, got {self.L}")
        if self.N < 80:
            raise ValueError(f"need at least 80 mesh points, got {self.N}")

    @property
    def N(self) -> int:
        return int(round(self.L / self.h))


def airy_tridiagonal(beta: float, h: float, N: int, noise: np.ndarray | None) -> SymmetricTridiagonal:
    """Discretized operator matrix for given noise realization (None = noiseless)."""
    k = np.arange(1, N + 1, dtype=float)
    diag = 2.0 / h**2 + k * h
    if noise is not None and math.isfinite(beta):
        diag = diag + (2.0 / math.sqrt(beta)) * noise / math.sqrt(h)
    offdiag = np.full(N - 1, -1.0 / h**2)
    return SymmetricTridiagonal(diag=diag, offdiag=offdiag)


def cell_noise(disc: AiryDiscretization, stream: RandomStream) -> np.ndarray | None:
    """Per-cell unit normals from the stream's micro-mesh Brownian tape.

    Cell k aggregates micro-increments mc*(k-1)..mc*k-1 of the tape, where
    mc = round(h / MICRO_STEP) (at least 1); the normalized sums are exactly
    i.i.d. standard normal for any h.  Noiseless discretizations consume no
    tape and return None.
    """
    if not math.isfinite(disc.beta):
        return None
    mc = max(1, int(round(disc.h / MICRO_STEP)))
    micro = stream.gaussians(disc.N * mc)
    return micro.reshape(disc.N, mc).sum(axis=1) / math.sqrt(mc)


def sample_tw(
    disc: AiryDiscretization, stream: RandomStream, cfg: EigConfig | None = None
) -> float:
    """One Tracy-Widom(beta) sample: minus the smallest eigenvalue of A.

    Pure function of (disc, stream state); the smallest eigenvalue is found
    by Sturm bisection.
    """
    A = airy_tridiagonal(disc.beta, disc.h, disc.N, cell_noise(disc, stream))
    return -tridiag_extreme_eig(A, "smallest", cfg)


def tw_reference_batch(
    beta: float,
    M: int,
    seed: int,
    disc: AiryDiscretization | None = None,
    cfg: EigConfig | None = None,
) -> SampleBatch:
    """M independent Tracy-Widom(beta) samples from substreams 0..M-1 of seed."""
    if M < 1:
        raise ValueError(f"need at least one replicate, got M={M}")
    if disc is None:
        disc = AiryDiscretization(beta=beta)
    elif disc.beta != beta:
        raise ValueError(f"discretization beta {disc.beta} does not match {beta}")
    order = np.array([sample_tw(disc, split_stream(seed, r), cfg) for r in range(M)])
    params = {
        "generator": "stochastic-airy",
        "beta": beta,
        "M": M,
        "seed": seed,
        "mesh": disc.h,
        "cutoff": disc.L,
    }
    return SampleBatch(label="tw-reference", params=params, values=order, order=order)
