"""Equal-size clustering, transport distances, cluster-wise blending and
density-based style transfer for volumetric point clouds."""

from .cluster import ClusterSet, assign_to_shared_centroids, cluster_assignment, constrained_kmeans
from .core import NormalizationTransform, normalize_unit_cube, perturb_gaussian
from .density import Density, density_subsample, kde_evaluate, style_source
from .embed import ExternalEmbedder, OTEmbedder, PcaEmbedder, PcaModel, pca_fit
from .io import load_cloud, store_cloud
from .metrics import (LossWeights, SinkhornParams, calibrate_weights, chamfer, combined_loss,
                      emd_exact, sinkhorn_divergence)
from .pipelines import (blend_pipeline, blend_sweep, naive_match_blend, style_transfer_pipeline,
                        style_transfer_sweep)

__version__ = "0.1.0"
