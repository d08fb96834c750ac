"""Tridiagonal beta-Laguerre matrices built from bidiagonal chi factors.

A factor B is lower bidiagonal with independent chi entries
``diag[j] ~ chi_{beta*(kappa-j+1)}`` (j = 1..n) and
``subdiag[j] ~ chi_{beta*(n-j)}`` (j = 1..n-1).  The ensemble matrix is the
scaled Gram matrix X = B^T B / beta, which is symmetric tridiagonal and
positive semidefinite; the 1/beta makes (sqrt(n)+sqrt(kappa))^2 the correct
centering for its largest eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .variates import RandomStream


@dataclass(frozen=True)
class EnsembleParams:
    """Size n, chi ladder parameter kappa >= n, and inverse-temperature beta > 0."""

    n: int
    kappa: int
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kappa < self.n:
            raise ValueError(f"kappa must be >= n, got kappa={self.kappa}, n={self.n}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class BidiagonalFactor:
    """Realized chi entries of one lower-bidiagonal factor."""

    n: int
    kappa: int
    beta: float
    diag: np.ndarray
    subdiag: np.ndarray

    def __post_init__(self):
        if len(self.diag) != self.n or len(self.subdiag) != self.n - 1:
            raise ValueError("factor entry lengths do not match n")
        if np.any(self.diag < 0) or np.any(self.subdiag < 0):
            raise ValueError("chi realizations must be nonnegative")

    def dense(self) -> np.ndarray:
        B = np.zeros((self.n, self.n))
        np.fill_diagonal(B, self.diag)
        B[np.arange(1, self.n), np.arange(self.n - 1)] = self.subdiag
        return B


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Symmetric tridiagonal matrix stored as its main and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError("offdiag must have length n-1")

    @property
    def n(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        A = np.diag(np.asarray(self.diag, dtype=float))
        idx = np.arange(self.n - 1)
        A[idx, idx + 1] = self.offdiag
        A[idx + 1, idx] = self.offdiag
        return A


@dataclass(frozen=True)
class PotentialPath:
    """Cumulative potential path of one sampled matrix on the grid k/m."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")


def sample_bidiagonal(params: EnsembleParams, stream: RandomStream) -> BidiagonalFactor:
    """Draw one bidiagonal factor.

    Tape discipline: entry j of the diagonal comes from ``stream.substream(j)``
    and entry j of the subdiagonal from ``stream.substream(n + j)`` (0-based),
    one chi draw per substream.  Entry values are therefore stable under any
    refactoring of draw order.
    """
    n, kappa, beta = params.n, params.kappa, params.beta
    diag = np.array(
        [stream.substream(j).chi(beta * (kappa - j)) for j in range(n)]
    )
    subdiag = np.array(
        [stream.substream(n + j).chi(beta * (n - 1 - j)) for j in range(n - 1)]
    )
    return BidiagonalFactor(n=n, kappa=kappa, beta=beta, diag=diag, subdiag=subdiag)


def laguerre_matrix(factor: BidiagonalFactor) -> SymmetricTridiagonal:
    """Form X = B^T B / beta without densifying.

    Entrywise, ``X[j,j] = (diag[j]^2 + subdiag[j]^2)/beta`` (the last
    subdiagonal term is the degenerate chi_0 = 0, never a sampled value) and
    ``X[j,j+1] = diag[j+1]*subdiag[j]/beta``.
    """
    d, s, beta = factor.diag, factor.subdiag, factor.beta
    diag = d * d
    diag[:-1] += s * s
    off = d[1:] * s
    return SymmetricTridiagonal(diag=diag / beta, offdiag=off / beta)


def tridiag_matvec(T: SymmetricTridiagonal, v: np.ndarray) -> np.ndarray:
    """Banded multiply T @ v in O(n)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (T.n,):
        raise ValueError(f"vector length {v.shape} does not match matrix size {T.n}")
    out = T.diag * v
    out[:-1] += T.offdiag * v[1:]
    out[1:] += T.offdiag * v[:-1]
    return out


def potential_path(factor: BidiagonalFactor, scaling) -> PotentialPath:
    """Realized potential path y_1(x) + y_2(x) of one sampled matrix.

    At grid points x_k = k/m (k = 1..n-1) the path is the cumulative sum of
    the diagonal deviations ``(n + i) - beta^{-1}(chi^2 + chi~^2)`` plus the
    off-diagonal deviations ``2(sqrt(n i) - beta^{-1} chi chi~)``, scaled by
    m/sqrt(n i).  Its empirical mean approaches x^2/2 as n grows; the noise
    about the mean approaches Brownian motion scaled by 2/sqrt(beta).

    ``scaling`` is the single-matrix constants record for the same (n, i);
    see :func:`lagprod.scaling.single_scaling`.
    """
    if scaling.n != factor.n or scaling.i != factor.kappa:
        raise ValueError(
            f"scaling record (n={scaling.n}, i={scaling.i}) does not match "
            f"factor (n={factor.n}, kappa={factor.kappa})"
        )
    n, i, beta = factor.n, factor.kappa, factor.beta
    X = laguerre_matrix(factor)
    terms = scaling.mu - (X.diag[:-1] + 2.0 * X.offdiag)
    values = np.cumsum(terms) * (scaling.m / np.sqrt(float(n) * float(i)))
    grid = np.arange(1, n) / scaling.m
    return PotentialPath(grid=grid, values=values)
