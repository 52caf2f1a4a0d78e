"""Vector math over the semantic embedding space.

Everything here is a pure function on fixed-dimension real vectors:
affine blending between two ideas (inside or outside their segment),
isotropic Gaussian perturbation, cosine similarity, and normalization.
All arithmetic runs in 64-bit floats regardless of how embeddings are
stored upstream, so results are stable enough to compare against
independent oracles at tight tolerances.

Randomness is produced exclusively by numpy's PCG64 generator seeded
with an explicit integer, which makes every stochastic operation
bit-reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LambdaOutOfRange, ZeroNormError


@dataclass(frozen=True, eq=False)
class Embedding:
    """A point in the encoder's d-dimensional semantic space.

    Values are held as a read-only float64 array. Construction rejects
    non-finite entries and anything that is not a 1-D vector, so code
    downstream never has to re-check.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError(f"embedding must be a non-empty 1-D vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("embedding contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def to_list(self) -> list[float]:
        return self.values.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:  # keep reprs short; vectors can be wide
        head = ", ".join(f"{v:.4g}" for v in self.values[:4])
        tail = ", ..." if self.dim > 4 else ""
        return f"Embedding(dim={self.dim}, [{head}{tail}])"


def _check_same_dim(a: Embedding, b: Embedding) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"embedding dimensions differ: {a.dim} vs {b.dim}")


def _affine(a: Embedding, b: Embedding, lam: float) -> np.ndarray:
    return lam * a.values + (1.0 - lam) * b.values


def interpolate(a: Embedding, b: Embedding, lam: float) -> Embedding:
    """Blend two embeddings: lam*a + (1-lam)*b with lam in [0, 1].

    lam=1 returns a exactly and lam=0 returns b exactly. The result is
    clamped into the per-coordinate box spanned by a and b, so convex-hull
    containment holds even when rounding would nudge a coordinate out by
    an ulp.
    """
    _check_same_dim(a, b)
    lam = float(lam)
    if not (0.0 <= lam <= 1.0):
        raise LambdaOutOfRange(
            f"interpolation requires lambda in [0, 1], got {lam}; use extrapolate() outside"
        )
    raw = _affine(a, b, lam)
    lo = np.minimum(a.values, b.values)
    hi = np.maximum(a.values, b.values)
    return Embedding(np.clip(raw, lo, hi))


def extrapolate(a: Embedding, b: Embedding, lam: float) -> Embedding:
    """Apply the same affine formula with lam outside [0, 1].

    Leaves the segment between a and b (whenever a != b), probing
    directions beyond the known pair.
    """
    _check_same_dim(a, b)
    lam = float(lam)
    if 0.0 <= lam <= 1.0:
        raise LambdaOutOfRange(
            f"extrapolation requires lambda outside [0, 1], got {lam}; use interpolate() inside"
        )
    return Embedding(_affine(a, b, lam))


def perturb(a: Embedding, sigma: float, rng_seed: int) -> Embedding:
    """Add isotropic Gaussian noise: a + eps, eps ~ N(0, sigma^2 I).

    Noise comes from numpy's PCG64 stream seeded with rng_seed, one
    draw per coordinate, so the same (a, sigma, rng_seed) always yields
    the same vector. sigma=0 is the identity.
    """
    sigma = float(sigma)
    if sigma < 0.0:
        raise ValueError(f"noise scale must be non-negative, got {sigma}")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    eps = rng.normal(0.0, sigma, size=a.dim)
    return Embedding(a.values + eps)


def cosine_similarity(a: Embedding, b: Embedding) -> float:
    """Cosine of the angle between a and b, clamped into [-1, 1]."""
    _check_same_dim(a, b)
    na = np.linalg.norm(a.values)
    nb = np.linalg.norm(b.values)
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine similarity is undefined for zero-norm vectors")
    raw = float(np.dot(a.values, b.values) / (na * nb))
    return min(1.0, max(-1.0, raw))


def renormalize(a: Embedding) -> Embedding:
    """Scale a to unit norm.

    Linear blends of unit vectors land inside the sphere; encoders
    trained with cosine objectives expect unit-norm inputs, so callers
    can re-project blended vectors back onto the sphere with this.
    """
    n = np.linalg.norm(a.values)
    if n == 0.0:
        raise ZeroNormError("cannot normalize a zero-norm vector")
    return Embedding(a.values / n)
