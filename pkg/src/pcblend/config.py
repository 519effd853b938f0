"""Default hyperparameters.

Values for cluster size, Sinkhorn blur/scaling, KDE bandwidth and noise level
follow the reported experimental setup; the rest are library choices.
"""

CLUSTER_SIZE = 2048
LATENT_DIM = 512

SINKHORN_BLUR = 1e-3
SINKHORN_SCALING = 0.9
SINKHORN_MAX_ITERS = 2000

KDE_BANDWIDTH = 0.01
NOISE_SIGMA = 0.001

KMEANS_MAX_ITERS = 100
KMEANS_TOL = 1e-9

CALIBRATION_PAIRS = 1000

DEFAULT_SEED = 0
