"""
Linear embedder and externally produced latents
===============================================

Fit a PCA model on clusters of a small corpus, blend in its latent space, and
feed latents stored on disk back through the decoder.
"""

import os
import sys

import numpy as np

from pcblend.cluster import constrained_kmeans
from pcblend.datagen import gen_dataset
from pcblend.embed import PcaEmbedder, load_latent, pca_fit, save_latent
from pcblend.metrics import chamfer
from pcblend.pipelines import blend_latents, blend_pipeline

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
os.makedirs(out, exist_ok=True)

# clusters of 256 points from 24 shapes
clusters = []
for item in gen_dataset(24, 2048, seed=0):
    clusters.extend(constrained_kmeans(item.points, 8, seed=0).clusters)
print("training clusters:", len(clusters))

for d in (8, 32, 128):
    model = pca_fit(clusters, d)
    e = PcaEmbedder(model)
    err = np.mean([chamfer(c, e.reconstruct(c)) for c in clusters[:20]])
    print(f"d={d:4d}  mean chamfer reconstruction error {err:.4f}")

e = PcaEmbedder(pca_fit(clusters, 128))
a, b = gen_dataset(2, 2048, seed=5)
z = blend_pipeline(a.points, b.points, 0.5, 8, embedder=e, seed=1)
print("blend through the PCA embedder:", z.points.shape)

# latents written by some other encoder, one file per cluster
za = [e.encode(c) for c in constrained_kmeans(a.points, 8, seed=1).clusters]
zb = [e.encode(c) for c in constrained_kmeans(b.points, 8, seed=1).clusters]
for i, (u, v) in enumerate(zip(za, zb)):
    save_latent(u, os.path.join(out, f"a_{i}.bin"))
    save_latent(v, os.path.join(out, f"b_{i}.bin"))
za = [load_latent(os.path.join(out, f"a_{i}.bin")) for i in range(8)]
zb = [load_latent(os.path.join(out, f"b_{i}.bin")) for i in range(8)]
print("decoded latent blend:", blend_latents(za, zb, 0.5, e.decode).shape)
