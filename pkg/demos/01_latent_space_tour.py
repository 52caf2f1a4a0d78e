"""
A tour of the latent-space primitives
=====================================

Embeddings, interpolation, extrapolation, noise, and the projector that
carries encoder vectors into a decoder's token space.  Everything here is
pure numerics; no backend is involved.
"""

import numpy as np

from ideonaut import (
    Embedding,
    Layer,
    ProjectorWeights,
    cosine_similarity,
    extrapolate,
    identity_projector,
    interpolate,
    load_weights,
    perturb,
    project,
    renormalize,
    save_weights,
)

rng = np.random.Generator(np.random.PCG64(42))

# Two idea embeddings, the way an encoder would hand them to us: unit
# vectors in a shared space.  Think "a chair" and "a ladder".
chair = Embedding(renormalize(Embedding(rng.normal(size=16))).values)
ladder = Embedding(renormalize(Embedding(rng.normal(size=16))).values)
print("dim:", chair.dim)
print("cosine(chair, ladder):", round(cosine_similarity(chair, ladder), 4))

# Interpolation blends per coordinate.  lam=1 is the first argument,
# lam=0 the second, and the published sweet spot sits near the middle.
for lam in (1.0, 0.75, 0.5, 0.25, 0.0):
    blend = interpolate(chair, ladder, lam)
    print(f"lam={lam:4.2f}  cos to chair {cosine_similarity(blend, chair):+.3f}"
          f"  cos to ladder {cosine_similarity(blend, ladder):+.3f}")

# The blend of two unit vectors is shorter than either parent, so runs on
# unit-normalized encoders renormalize before decoding.
midpoint = interpolate(chair, ladder, 0.5)
print("midpoint norm before:", round(float(np.linalg.norm(midpoint.values)), 4))
print("midpoint norm after: ",
      round(float(np.linalg.norm(renormalize(midpoint).values)), 4))

# Extrapolation walks past an endpoint instead of between them.
beyond = extrapolate(chair, ladder, 1.3)
print("extrapolated cos to chair:", round(cosine_similarity(beyond, chair), 4))

# Perturbation adds seeded Gaussian noise; the same seed replays exactly.
once = perturb(chair, sigma=0.1, rng_seed=7)
again = perturb(chair, sigma=0.1, rng_seed=7)
print("perturb replays bit-for-bit:", np.array_equal(once.values, again.values))

# The projector maps encoder space into decoder token space.  The
# identity projector is the degenerate case used when both spaces match.
same = project(midpoint, identity_projector(16))
print("identity projector is exact:", np.array_equal(same.values, midpoint.values))

# A real projector is a small MLP.  Weights serialize to a compact binary
# format and come back bit-identical, so runs can pin them by file.
mlp = ProjectorWeights(
    layers=(
        Layer(weight=rng.normal(size=(32, 16)).astype("<f4"),
              bias=rng.normal(size=32).astype("<f4"), activation="gelu"),
        Layer(weight=rng.normal(size=(24, 32)).astype("<f4"),
              bias=np.zeros(24, dtype="<f4"), activation="none"),
    ),
    input_dim=16,
    output_dim=24,
)
projected = project(midpoint, mlp)
print("projected dim:", projected.dim)

blob = save_weights(mlp)
print("serialized bytes:", len(blob), "| round trip stable:",
      save_weights(load_weights(blob)) == blob)
