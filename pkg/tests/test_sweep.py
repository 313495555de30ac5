from dataclasses import replace

import numpy as np
import pytest

from synthmetrics import (
    EmbeddingMatrix,
    InsufficientTrialsError,
    PairingSpec,
    SweepConfig,
    SynthMetricsError,
    TooFewSamplesError,
    aggregate_reports,
    bootstrap_interval,
    reports_to_csv,
    run_sweep,
    stability_assessment,
)
from synthmetrics.metrics import MetricReport
from synthmetrics.sweep import SweepResult

from conftest import random_image_set


def gaussian_embeddings(rng, count=400, dims=8, embedder_id="fixture"):
    return EmbeddingMatrix(
        rng.standard_normal((count, dims)).astype(np.float32), embedder_id
    )


def embedding_config(**overrides):
    defaults = dict(
        fractions=(0.25, 0.5, 1.0),
        trials_per_fraction=3,
        base_seed=11,
        metrics=("cosine_diversity", "fid"),
        pairing=PairingSpec(pair_count=50, seed=0),
    )
    defaults.update(overrides)
    return SweepConfig(**defaults)


class TestRunSweep:
    def test_default_fractions_on_class_sized_fixture(self, rng):
        real = gaussian_embeddings(rng, count=1214)
        synth = gaussian_embeddings(rng, count=1214)
        config = embedding_config(
            fractions=(0.25, 0.5, 0.75, 1.0), trials_per_fraction=2
        )
        result = run_sweep(
            None, None, config, real_embeddings=real, synth_embeddings=synth
        )
        sizes = {
            r.fraction: r.count for r in result.reports if r.metric_id == "fid"
        }
        assert sizes == {0.25: 303, 0.5: 607, 0.75: 910, 1.0: 1214}

    def test_deterministic(self, rng):
        real = gaussian_embeddings(rng)
        synth = gaussian_embeddings(rng)
        config = embedding_config()
        a = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        b = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        assert a.reports == b.reports
        assert a.aggregates == b.aggregates

    def test_trial_grid_complete_per_provenance(self, rng):
        real = gaussian_embeddings(rng)
        synth = gaussian_embeddings(rng)
        config = embedding_config()
        result = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        seen = {}
        for r in result.reports:
            key = (r.metric_id, r.provenance_compared, r.fraction, r.trial)
            seen[key] = seen.get(key, 0) + 1
        assert set(seen.values()) == {1}
        for fraction in config.fractions:
            expected_trials = config.trials_for(fraction)
            for provenance in ("real", "synthetic"):
                trials = [
                    t
                    for (m, p, f, t) in seen
                    if m == "cosine_diversity" and p == provenance and f == fraction
                ]
                assert sorted(trials) == list(range(expected_trials))

    def test_one_to_one_ratio_with_unequal_inputs(self, rng):
        real = gaussian_embeddings(rng, count=500)
        synth = gaussian_embeddings(rng, count=300)
        config = embedding_config(fractions=(0.5, 1.0))
        result = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        fid_counts = {r.fraction: r.count for r in result.reports if r.metric_id == "fid"}
        assert fid_counts == {0.5: 150, 1.0: 300}

    def test_image_sets_drive_all_three_metrics(self, rng):
        real = random_image_set(rng, count=10, provenance="real")
        synth = random_image_set(rng, count=10, provenance="synthetic")
        config = SweepConfig(
            fractions=(0.5, 1.0),
            trials_per_fraction=2,
            base_seed=4,
        )
        result = run_sweep(real, synth, config)
        metrics_seen = {r.metric_id for r in result.reports}
        assert metrics_seen == {"ms_ssim_diversity", "cosine_diversity", "fid"}

    def test_identical_sets_give_zero_fid(self, rng):
        images = random_image_set(rng, count=8)
        real = images
        synth = random_image_set(rng, count=1)  # placeholder, replaced below
        synth = replace_provenance(images, "synthetic")
        config = SweepConfig(fractions=(1.0,), trials_per_fraction=1, metrics=("fid",))
        result = run_sweep(real, synth, config)
        assert len(result.reports) == 1
        assert abs(result.reports[0].value) < 1e-8

    def test_full_fraction_runs_single_trial(self, rng):
        real = gaussian_embeddings(rng)
        synth = gaussian_embeddings(rng)
        config = embedding_config(trials_per_fraction=5)
        result = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        full_trials = [r.trial for r in result.reports if r.fraction == 1.0]
        assert set(full_trials) == {0}

    def test_missing_inputs_for_selected_metrics(self, rng):
        config = SweepConfig(metrics=("ms_ssim_diversity",))
        with pytest.raises(SynthMetricsError):
            run_sweep(None, None, config, real_embeddings=gaussian_embeddings(rng))

    def test_too_small_fraction_has_context(self, rng):
        real = gaussian_embeddings(rng, count=100)
        synth = gaussian_embeddings(rng, count=100)
        config = embedding_config(fractions=(0.001, 1.0))
        with pytest.raises(TooFewSamplesError):
            run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)

    def test_mismatched_image_and_embedding_counts(self, rng):
        images = random_image_set(rng, count=10)
        emb = gaussian_embeddings(rng, count=12)
        config = embedding_config(fractions=(1.0,))
        with pytest.raises(SynthMetricsError):
            run_sweep(
                images,
                replace_provenance(images, "synthetic"),
                config,
                real_embeddings=emb,
                synth_embeddings=emb,
            )

    def test_aggregate_mean_matches_reports(self, rng):
        real = gaussian_embeddings(rng)
        synth = gaussian_embeddings(rng)
        config = embedding_config()
        result = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        for (metric, provenance, fraction), stats in result.aggregates.items():
            values = [
                r.value
                for r in result.reports
                if (r.metric_id, r.provenance_compared, r.fraction)
                == (metric, provenance, fraction)
            ]
            assert abs(stats.mean - np.mean(values)) < 1e-12
            assert stats.n_trials == len(values)


def replace_provenance(image_set, provenance):
    from synthmetrics import ImageSet

    return ImageSet(
        class_label=image_set.class_label,
        provenance=provenance,
        pixels=image_set.pixels,
        value_range=image_set.value_range,
    )


class TestBootstrapInterval:
    def test_single_value_degenerate(self):
        assert bootstrap_interval([3.5], seed=1) == (3.5, 3.5)

    def test_constant_values_degenerate(self):
        lo, hi = bootstrap_interval([2.0] * 10, seed=1)
        assert lo == hi == 2.0

    def test_seeded_determinism(self, rng):
        values = rng.standard_normal(10)
        assert bootstrap_interval(values, seed=9) == bootstrap_interval(values, seed=9)

    def test_interval_brackets_the_sample(self, rng):
        values = rng.standard_normal(12)
        lo, hi = bootstrap_interval(values, seed=2)
        assert values.min() <= lo < hi <= values.max()


def synthetic_result(rng, shift_25=0.0, sigma=0.01, trials=10):
    """Fabricated cosine-diversity sweep reports around 1.0."""
    reports = []
    for fraction in (0.25, 0.5, 0.75, 1.0):
        n_trials = 1 if fraction == 1.0 else trials
        for trial in range(n_trials):
            # Reference sits at the exact trial-distribution center so the
            # only separation is the one this fixture constructs.
            value = 1.0 if fraction == 1.0 else 1.0 + sigma * float(rng.standard_normal())
            if fraction == 0.25:
                value += shift_25
            reports.append(
                MetricReport(
                    metric_id="cosine_diversity",
                    class_label="fix",
                    provenance_compared="synthetic",
                    value=value,
                    fraction=fraction,
                    trial=trial,
                    seed=0,
                    count=100,
                )
            )
    return SweepResult(
        reports=tuple(reports), aggregates=aggregate_reports(reports, 7), base_seed=7
    )


class TestStabilityAssessment:
    def test_constant_metric_is_stable(self, rng):
        result = synthetic_result(rng, sigma=0.0)
        verdicts = stability_assessment(result)
        assert verdicts["cosine_diversity"].verdict == "stable"
        assert verdicts["cosine_diversity"].offending_fractions == ()

    def test_ten_sigma_shift_flags_quarter_fraction(self, rng):
        result = synthetic_result(rng, shift_25=0.1, sigma=0.01)
        verdicts = stability_assessment(result)
        v = verdicts["cosine_diversity"]
        assert v.verdict == "sensitive"
        assert v.offending_fractions == (0.25,)

    def test_single_fraction_is_insufficient(self, rng):
        reports = [
            MetricReport("fid", "c", "real_vs_synthetic", 1.0, fraction=1.0, trial=0)
        ]
        result = SweepResult(
            reports=tuple(reports),
            aggregates=aggregate_reports(reports, 1),
            base_seed=1,
        )
        with pytest.raises(InsufficientTrialsError):
            stability_assessment(result)

    def test_missing_full_fraction_is_insufficient(self, rng):
        reports = [
            MetricReport(
                "fid", "c", "real_vs_synthetic", 1.0, fraction=f, trial=t
            )
            for f in (0.25, 0.5)
            for t in range(3)
        ]
        result = SweepResult(
            reports=tuple(reports),
            aggregates=aggregate_reports(reports, 1),
            base_seed=1,
        )
        with pytest.raises(InsufficientTrialsError):
            stability_assessment(result)

    def test_single_trial_per_fraction_is_insufficient(self, rng):
        result = synthetic_result(rng, trials=1)
        with pytest.raises(InsufficientTrialsError):
            stability_assessment(result)

    def test_verdict_serializes(self, rng):
        verdicts = stability_assessment(synthetic_result(rng))
        payload = verdicts["cosine_diversity"].to_dict()
        assert payload["verdict"] in ("stable", "sensitive")
        assert isinstance(payload["checks"], list)


class TestSerialization:
    def test_csv_shape_and_header(self, rng):
        real = gaussian_embeddings(rng)
        synth = gaussian_embeddings(rng)
        config = embedding_config()
        result = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        text = reports_to_csv(result.reports)
        lines = text.strip().split("\n")
        assert lines[0] == "metric,class,provenance,fraction,trial,seed,count,value"
        assert len(lines) == 1 + len(result.reports)
        assert all(len(line.split(",")) == 8 for line in lines[1:])

    def test_csv_round_trips_values_exactly(self, rng):
        real = gaussian_embeddings(rng)
        synth = gaussian_embeddings(rng)
        config = embedding_config(fractions=(1.0,))
        result = run_sweep(None, None, config, real_embeddings=real, synth_embeddings=synth)
        line = reports_to_csv(result.reports).strip().split("\n")[1]
        value = float(line.split(",")[-1])
        assert value == result.reports[0].value


class TestConfigValidation:
    def test_rejects_unsorted_or_duplicate_fractions(self):
        with pytest.raises(ValueError):
            SweepConfig(fractions=(0.5, 0.25))
        with pytest.raises(ValueError):
            SweepConfig(fractions=(0.5, 0.5))

    def test_rejects_out_of_range_fraction(self):
        with pytest.raises(ValueError):
            SweepConfig(fractions=(0.0, 1.0))

    def test_rejects_unknown_metric(self):
        with pytest.raises(ValueError):
            SweepConfig(metrics=("novelty",))

    def test_rejects_nonpositive_trials(self):
        with pytest.raises(ValueError):
            SweepConfig(trials_per_fraction=0)
