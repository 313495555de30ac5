"""synthmetrics: diversity and quality metrics for synthetic image sets.

The library quantifies how diverse a set of generated grayscale images is
(mean pairwise MS-SSIM, mean pairwise cosine distance over feature
embeddings) and how close it sits to a real set (Frechet distance between
fitted Gaussians), and re-runs those metrics over seeded fractional
subsamples to measure their sensitivity to sample size.
"""

__version__ = "0.1.0"

from .dataset import (
    ImageSet,
    Manifest,
    ManifestEntry,
    SubsampleSpec,
    load_idx,
    load_image_dir,
    read_manifest,
    subsample,
    subsample_indices,
    write_idx,
    write_image_dir,
    write_manifest,
)
from .embed import (
    REF_EMBEDDER_ID,
    EmbedderSpec,
    EmbeddingMatrix,
    embed_reference,
    read_embeddings,
    write_embeddings,
)
from .errors import (
    DimensionMismatchError,
    EmbedderMismatchError,
    EmptySetError,
    FormatError,
    InsufficientTrialsError,
    ManifestError,
    NumericalError,
    SynthMetricsError,
    TooFewSamplesError,
    TruncationError,
    ZeroNormRowError,
)
from .metrics import (
    GaussianStats,
    MetricReport,
    PairingSpec,
    cosine_diversity,
    fid,
    fit_gaussian,
    ms_ssim_diversity,
    select_pairs,
)
from .seeding import DEFAULT_SEED, derive_seed, make_rng
from .ssim import SsimParams, SsimScore, gaussian_window, ms_ssim, num_scales, ssim
from .sweep import (
    AggregateStats,
    StabilityVerdict,
    SweepConfig,
    SweepResult,
    aggregate_reports,
    bootstrap_interval,
    reports_to_csv,
    run_sweep,
    stability_assessment,
    write_reports_csv,
)

__all__ = [
    "__version__",
    # dataset
    "ImageSet",
    "Manifest",
    "ManifestEntry",
    "SubsampleSpec",
    "load_idx",
    "load_image_dir",
    "read_manifest",
    "subsample",
    "subsample_indices",
    "write_idx",
    "write_image_dir",
    "write_manifest",
    # embed
    "REF_EMBEDDER_ID",
    "EmbedderSpec",
    "EmbeddingMatrix",
    "embed_reference",
    "read_embeddings",
    "write_embeddings",
    # errors
    "SynthMetricsError",
    "FormatError",
    "TruncationError",
    "DimensionMismatchError",
    "EmptySetError",
    "TooFewSamplesError",
    "ZeroNormRowError",
    "EmbedderMismatchError",
    "NumericalError",
    "InsufficientTrialsError",
    "ManifestError",
    # metrics
    "GaussianStats",
    "MetricReport",
    "PairingSpec",
    "cosine_diversity",
    "fid",
    "fit_gaussian",
    "ms_ssim_diversity",
    "select_pairs",
    # seeding
    "DEFAULT_SEED",
    "derive_seed",
    "make_rng",
    # ssim
    "SsimParams",
    "SsimScore",
    "gaussian_window",
    "ms_ssim",
    "num_scales",
    "ssim",
    # sweep
    "AggregateStats",
    "StabilityVerdict",
    "SweepConfig",
    "SweepResult",
    "aggregate_reports",
    "bootstrap_interval",
    "reports_to_csv",
    "run_sweep",
    "stability_assessment",
    "write_reports_csv",
]
