"""Sample-size sensitivity sweeps and their stability assessment.

A sweep re-evaluates the selected metrics at several subsample fractions,
holding the real:synthetic ratio at 1:1. For fraction ``f`` and trial ``t``
both sets are subsampled to ``n = floor(f * min(N_real, N_synth))`` images;
the full fraction runs a single trial because the subsample is then the whole
set. Every random choice is seeded by a stated hash of
``(base_seed, fraction, trial, role)`` (see :func:`synthmetrics.seeding.derive_seed`),
so a sweep is a pure function of its inputs and configuration.

Per (metric, provenance, fraction) the aggregates carry the trial mean, the
population standard deviation, and a 95% interval for the score distribution:
a bagged bootstrap percentile interval (seeded, 1000 resamples of the trial
values; each resample's 2.5th/97.5th percentiles are averaged). This mirrors
reading a box plot: the interval tracks where trial scores fall rather than
how precisely their mean is known, which is the weakest faithful reading of
"the scores do not move when the sample size changes".

``stability_assessment`` then calls a metric "stable" exactly when every
sub-100% fraction's interval contains the full-sample point estimate, and
"sensitive" otherwise, listing the offending fractions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import ImageSet, floor_count, subsample_indices
from .embed import EmbeddingMatrix, embed_reference
from .errors import (
    DimensionMismatchError,
    InsufficientTrialsError,
    SynthMetricsError,
    TooFewSamplesError,
)
from .metrics import (
    FID_COMPARISON,
    METRIC_IDS,
    MetricReport,
    PairingSpec,
    cosine_diversity,
    fid,
    fit_gaussian,
    ms_ssim_diversity,
)
from .seeding import derive_seed, make_rng
from .ssim import SsimParams

DEFAULT_FRACTIONS = (0.25, 0.5, 0.75, 1.0)

CSV_HEADER = "metric,class,provenance,fraction,trial,seed,count,value"


@dataclass(frozen=True)
class SweepConfig:
    """Fractions, trials, seeds, and metric selection for one sweep."""

    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    trials_per_fraction: int = 10
    base_seed: int = 0
    metrics: tuple[str, ...] = METRIC_IDS
    pairing: PairingSpec = field(default_factory=PairingSpec)
    ssim_params: SsimParams = field(default_factory=SsimParams)

    def __post_init__(self):
        fractions = tuple(float(f) for f in self.fractions)
        if not fractions:
            raise ValueError("fractions must be non-empty")
        if any(not (0.0 < f <= 1.0) for f in fractions):
            raise ValueError("fractions must lie in (0, 1]")
        if list(fractions) != sorted(fractions) or len(set(fractions)) != len(fractions):
            raise ValueError("fractions must be strictly ascending")
        if self.trials_per_fraction < 1:
            raise ValueError("trials_per_fraction must be >= 1")
        metrics = tuple(self.metrics)
        if not metrics or any(m not in METRIC_IDS for m in metrics):
            raise ValueError(f"metrics must be a non-empty subset of {METRIC_IDS}")
        object.__setattr__(self, "fractions", fractions)
        object.__setattr__(self, "metrics", metrics)

    def trials_for(self, fraction: float) -> int:
        """Single trial at the full fraction: no subsampling randomness left."""
        return 1 if fraction == 1.0 else self.trials_per_fraction


@dataclass(frozen=True)
class AggregateStats:
    mean: float
    std: float
    ci_low: float
    ci_high: float
    n_trials: int


@dataclass(frozen=True)
class SweepResult:
    reports: tuple[MetricReport, ...]
    aggregates: dict[tuple[str, str, float], AggregateStats]
    base_seed: int


@dataclass(frozen=True)
class StabilityVerdict:
    metric_id: str
    verdict: str  # "stable" | "sensitive"
    offending_fractions: tuple[float, ...]
    checks: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_id,
            "verdict": self.verdict,
            "offending_fractions": list(self.offending_fractions),
            "checks": [dict(c) for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Bootstrap interval
# ---------------------------------------------------------------------------

def bootstrap_interval(
    values, seed: int, resamples: int = 1000, alpha: float = 0.05
) -> tuple[float, float]:
    """Bagged bootstrap percentile interval for the score distribution.

    Draws ``resamples`` bootstrap samples of the values (with replacement,
    PCG64 seeded), takes each sample's ``alpha/2`` and ``1 - alpha/2``
    percentiles, and averages them. A single value yields the degenerate
    interval [v, v].
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("bootstrap_interval needs at least one value")
    if arr.size == 1:
        v = float(arr[0])
        return v, v
    rng = make_rng(seed)
    picks = rng.integers(0, arr.size, size=(resamples, arr.size))
    samples = arr[picks]
    low = float(np.percentile(samples, 100.0 * alpha / 2.0, axis=1).mean())
    high = float(np.percentile(samples, 100.0 * (1.0 - alpha / 2.0), axis=1).mean())
    return low, high


def aggregate_reports(
    reports, base_seed: int
) -> dict[tuple[str, str, float], AggregateStats]:
    """Group reports by (metric, provenance, fraction) and summarize each group."""
    groups: dict[tuple[str, str, float], list[float]] = {}
    for report in reports:
        key = (report.metric_id, report.provenance_compared, report.fraction)
        groups.setdefault(key, []).append(report.value)
    aggregates = {}
    for key, values in groups.items():
        metric_id, provenance, fraction = key
        arr = np.asarray(values, dtype=np.float64)
        lo, hi = bootstrap_interval(
            arr, derive_seed(base_seed, "bootstrap", metric_id, provenance, fraction)
        )
        aggregates[key] = AggregateStats(
            mean=float(arr.mean()),
            std=float(arr.std()),
            ci_low=lo,
            ci_high=hi,
            n_trials=int(arr.size),
        )
    return aggregates


# ---------------------------------------------------------------------------
# Sweep execution
# ---------------------------------------------------------------------------

def _require(condition: bool, message: str):
    if not condition:
        raise SynthMetricsError(message)


def run_sweep(
    real: ImageSet | None,
    synth: ImageSet | None,
    config: SweepConfig,
    *,
    real_embeddings: EmbeddingMatrix | None = None,
    synth_embeddings: EmbeddingMatrix | None = None,
) -> SweepResult:
    """Run the full fraction x trial grid and aggregate the reports.

    Image sets drive ms_ssim_diversity; embeddings drive cosine_diversity and
    fid. Embeddings may be precomputed (rows aligned with image order) or are
    produced per subsample by the reference embedder when image sets are
    given. Either side may be omitted if no selected metric needs it.
    """
    need_images = "ms_ssim_diversity" in config.metrics
    need_embeddings = bool({"cosine_diversity", "fid"} & set(config.metrics))
    if need_images:
        _require(
            real is not None and synth is not None,
            "ms_ssim_diversity needs real and synthetic image sets",
        )
    if need_embeddings:
        _require(
            (real is not None or real_embeddings is not None)
            and (synth is not None or synth_embeddings is not None),
            "cosine_diversity/fid need image sets or precomputed embeddings",
        )

    def _count(images: ImageSet | None, emb: EmbeddingMatrix | None, side: str) -> int:
        if images is not None and emb is not None and images.count != emb.count:
            raise DimensionMismatchError(
                f"{side}: {images.count} images but {emb.count} embedding rows"
            )
        return images.count if images is not None else emb.count

    n_real = _count(real, real_embeddings, "real")
    n_synth = _count(synth, synth_embeddings, "synthetic")
    if real is not None and synth is not None:
        if (real.height, real.width) != (synth.height, synth.width):
            raise DimensionMismatchError(
                f"real images are {real.width}x{real.height} but synthetic are "
                f"{synth.width}x{synth.height}"
            )
    n_min = min(n_real, n_synth)
    smallest = floor_count(config.fractions[0], n_min)
    if smallest < 2:
        raise TooFewSamplesError(
            f"fraction {config.fractions[0]} of {n_min} images keeps {smallest}; "
            "pairwise metrics need at least 2"
        )

    class_label = ""
    for source in (real, synth):
        if source is not None:
            class_label = source.class_label
            break

    reports: list[MetricReport] = []
    for fraction in config.fractions:
        n = floor_count(fraction, n_min)
        for trial in range(config.trials_for(fraction)):
            try:
                reports.extend(
                    _run_trial(
                        real,
                        synth,
                        real_embeddings,
                        synth_embeddings,
                        n_real,
                        n_synth,
                        n,
                        fraction,
                        trial,
                        config,
                        class_label,
                    )
                )
            except SynthMetricsError as exc:
                raise SynthMetricsError(
                    f"fraction={fraction} trial={trial}: {exc}"
                ) from exc
    reports.sort(
        key=lambda r: (r.metric_id, r.fraction, r.trial, r.provenance_compared)
    )
    return SweepResult(
        reports=tuple(reports),
        aggregates=aggregate_reports(reports, config.base_seed),
        base_seed=config.base_seed,
    )


def _run_trial(
    real,
    synth,
    real_embeddings,
    synth_embeddings,
    n_real: int,
    n_synth: int,
    n: int,
    fraction: float,
    trial: int,
    config: SweepConfig,
    class_label: str,
) -> list[MetricReport]:
    base = config.base_seed
    trial_seed = derive_seed(base, fraction, trial)
    idx_real = subsample_indices(n_real, n, derive_seed(base, fraction, trial, "subsample", "real"))
    idx_synth = subsample_indices(
        n_synth, n, derive_seed(base, fraction, trial, "subsample", "synthetic")
    )

    sub_images = {}
    if real is not None:
        sub_images["real"] = real.take(idx_real)
    if synth is not None:
        sub_images["synthetic"] = synth.take(idx_synth)

    sub_emb = {}
    if {"cosine_diversity", "fid"} & set(config.metrics):
        if real_embeddings is not None:
            sub_emb["real"] = real_embeddings.take(idx_real)
        elif real is not None:
            sub_emb["real"] = embed_reference(sub_images["real"])
        if synth_embeddings is not None:
            sub_emb["synthetic"] = synth_embeddings.take(idx_synth)
        elif synth is not None:
            sub_emb["synthetic"] = embed_reference(sub_images["synthetic"])

    out: list[MetricReport] = []
    for metric in config.metrics:
        if metric == "ms_ssim_diversity":
            for provenance in ("real", "synthetic"):
                out.append(
                    ms_ssim_diversity(
                        sub_images[provenance],
                        config.pairing,
                        config.ssim_params,
                        fraction=fraction,
                        trial=trial,
                        seed=derive_seed(base, fraction, trial, "pairs", provenance),
                    )
                )
        elif metric == "cosine_diversity":
            for provenance in ("real", "synthetic"):
                out.append(
                    cosine_diversity(
                        sub_emb[provenance],
                        config.pairing,
                        class_label=class_label,
                        provenance=provenance,
                        fraction=fraction,
                        trial=trial,
                        seed=derive_seed(base, fraction, trial, "pairs", provenance),
                    )
                )
        else:
            out.append(
                fid(
                    fit_gaussian(sub_emb["real"]),
                    fit_gaussian(sub_emb["synthetic"]),
                    class_label=class_label,
                    fraction=fraction,
                    trial=trial,
                    seed=trial_seed,
                )
            )
    return out


# ---------------------------------------------------------------------------
# Stability assessment
# ---------------------------------------------------------------------------

def stability_assessment(result: SweepResult) -> dict[str, StabilityVerdict]:
    """Judge each metric stable/sensitive by interval containment.

    Needs a fraction-1.0 reference plus at least two sub-100% fractions with
    at least two trials each; raises :class:`InsufficientTrialsError`
    otherwise.
    """
    by_metric: dict[str, dict[str, dict[float, AggregateStats]]] = {}
    for (metric_id, provenance, fraction), stats in result.aggregates.items():
        by_metric.setdefault(metric_id, {}).setdefault(provenance, {})[fraction] = stats

    verdicts: dict[str, StabilityVerdict] = {}
    for metric_id, by_provenance in sorted(by_metric.items()):
        offending: set[float] = set()
        checks: list[dict] = []
        for provenance, by_fraction in sorted(by_provenance.items()):
            if 1.0 not in by_fraction:
                raise InsufficientTrialsError(
                    f"{metric_id}/{provenance}: no fraction-1.0 reference in the sweep"
                )
            sub = {f: s for f, s in by_fraction.items() if f != 1.0}
            if len(sub) < 2 or any(s.n_trials < 2 for s in sub.values()):
                raise InsufficientTrialsError(
                    f"{metric_id}/{provenance}: stability needs >= 2 sub-100% "
                    "fractions with >= 2 trials each"
                )
            reference = by_fraction[1.0].mean
            for fraction, stats in sorted(sub.items()):
                contained = stats.ci_low <= reference <= stats.ci_high
                checks.append(
                    {
                        "provenance": provenance,
                        "fraction": fraction,
                        "ci_low": stats.ci_low,
                        "ci_high": stats.ci_high,
                        "reference": reference,
                        "contained": contained,
                    }
                )
                if not contained:
                    offending.add(fraction)
        verdicts[metric_id] = StabilityVerdict(
            metric_id=metric_id,
            verdict="stable" if not offending else "sensitive",
            offending_fractions=tuple(sorted(offending)),
            checks=tuple(checks),
        )
    return verdicts


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    """Shortest round-trip decimal form; stable across runs and platforms."""
    return repr(float(x))


def reports_to_csv(reports) -> str:
    lines = [CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.metric_id},{r.class_label},{r.provenance_compared},"
            f"{_fmt(r.fraction)},{r.trial},{r.seed},{r.count},{_fmt(r.value)}"
        )
    return "\n".join(lines) + "\n"


def write_reports_csv(reports, path) -> None:
    Path(path).write_text(reports_to_csv(reports), encoding="utf-8")


def aggregates_to_dict(result: SweepResult) -> dict:
    out: dict = {}
    for (metric_id, provenance, fraction), stats in sorted(result.aggregates.items()):
        out.setdefault(metric_id, {}).setdefault(provenance, {})[_fmt(fraction)] = {
            "mean": stats.mean,
            "std": stats.std,
            "ci_low": stats.ci_low,
            "ci_high": stats.ci_high,
            "n_trials": stats.n_trials,
        }
    return out


def write_aggregates_json(payload: dict, path) -> None:
    """Write a deterministic (sorted-keys) JSON document."""
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
