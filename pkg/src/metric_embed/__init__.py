"""Constructive metric embeddings of finite metric spaces, with certificates."""

from .core import (
    BlockVector,
    EmbeddingTable,
    FiniteMetricSpace,
    block_norm,
    lipschitz_constant,
    snowflake,
    validate_metric,
)
from .generators import binary_tree, dyadic_interval, generate, grid_subset, path, random_lp_subset
from .nets import Skeleton, greedy_net, retract
from .frechet import frechet
from .compact import DecayModulus, compact_embedding, truncation_depth
from .gluing import LocalEmbeddingFamily, annulus_index, augment_with_radius, frechet_family, glue
from .analysis import (
    EnvelopeSpec,
    ModulusProfile,
    coarse_lipschitz_fit,
    compression_exponent_estimate,
    distortion,
    envelope_check,
    moduli,
)
from .interlacing import InterlacingGraph, build_graph, interlace, q_constant_search
from .stability import (
    DoubleLimitReport,
    SequenceFamily,
    double_limit,
    lp_additivity_check,
    snowflake_invariance_probe,
)

__version__ = "0.1.0"
