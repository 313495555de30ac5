"""Command-line interface.

Subcommands:

* ``evaluate``: all three metrics for one class at fraction 1.0.
* ``sweep``: the sample-size sensitivity protocol with aggregates and
  stability verdicts.
* ``embed``: write reference-embedder EMB1 files for a class.
* ``convert``: unpack an IDX file into a PNG image directory.

Exit codes: 0 on success, 1 for computation or format failures, 2 for usage
or manifest problems. Every evaluate/sweep run writes a reproducibility
stanza (seeds, parameters, embedder id, toolkit version) into its JSON
output, and identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import ImageSet, Manifest, load_idx, read_manifest, write_image_dir
from .embed import (
    REF_EMBEDDER_ID,
    EmbeddingMatrix,
    embed_reference,
    read_embeddings,
    write_embeddings,
)
from .errors import InsufficientTrialsError, ManifestError, SynthMetricsError
from .metrics import PairingSpec
from .seeding import DEFAULT_SEED
from .ssim import SsimParams
from .sweep import (
    DEFAULT_FRACTIONS,
    SweepConfig,
    aggregates_to_dict,
    run_sweep,
    stability_assessment,
    write_aggregates_json,
    write_reports_csv,
)

USAGE_EXIT = 2
FAILURE_EXIT = 1


def _add_common_eval_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--manifest", required=True, help="manifest file path")
    parser.add_argument("--class", dest="class_label", required=True, help="class label")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base seed (default 0)")
    parser.add_argument("--pairs", type=int, default=100, help="pairs per diversity score")
    parser.add_argument("--window-size", type=int, default=11, help="SSIM window size")
    parser.add_argument(
        "--value-range",
        choices=("255", "1"),
        default="255",
        help="pixel dynamic range for SSIM (default 255)",
    )
    parser.add_argument(
        "--embedder",
        default="ref",
        help="'ref' or 'file:<dir>' with <class>_<provenance>.emb files",
    )
    parser.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synthmetrics",
        description="Diversity and quality metrics for synthetic image sets.",
    )
    parser.add_argument("--version", action="version", version=f"synthmetrics {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="single-shot metrics at fraction 1.0")
    _add_common_eval_flags(p_eval)

    p_sweep = sub.add_parser("sweep", help="sample-size sensitivity sweep")
    _add_common_eval_flags(p_sweep)
    p_sweep.add_argument(
        "--fractions",
        default=",".join(str(f) for f in DEFAULT_FRACTIONS),
        help="comma-separated fractions in (0, 1] (default 0.25,0.5,0.75,1.0)",
    )
    p_sweep.add_argument(
        "--trials", type=int, default=10, help="trials per sub-100%% fraction (default 10)"
    )

    p_embed = sub.add_parser("embed", help="write EMB1 files via the reference embedder")
    p_embed.add_argument("--manifest", required=True)
    p_embed.add_argument("--class", dest="class_label", required=True)
    p_embed.add_argument(
        "--provenance",
        choices=("real", "synthetic"),
        help="restrict to one provenance (default: every entry for the class)",
    )
    p_embed.add_argument("--out", required=True, help="output directory")

    p_convert = sub.add_parser("convert", help="unpack an IDX file into a PNG directory")
    p_convert.add_argument("idx_in", help="input IDX file")
    p_convert.add_argument("dir_out", help="output image directory")

    return parser


def _prepare_out_dir(raw: str) -> Path:
    out = Path(raw)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise ManifestError(f"output directory is not writable: {out}")
    return out


def _read_manifest(path) -> Manifest:
    try:
        return read_manifest(path)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc


def _load_pair(manifest: Manifest, class_label: str, unit_range: bool) -> tuple[ImageSet, ImageSet]:
    real = manifest.load_set(class_label, "real")
    synth = manifest.load_set(class_label, "synthetic")
    if unit_range:
        real, synth = real.to_unit_range(), synth.to_unit_range()
    return real, synth


def _load_file_embeddings(
    spec: str, class_label: str
) -> tuple[EmbeddingMatrix, EmbeddingMatrix]:
    directory = Path(spec.split(":", 1)[1])
    real_path = directory / f"{class_label}_real.emb"
    synth_path = directory / f"{class_label}_synthetic.emb"
    for p in (real_path, synth_path):
        if not p.exists():
            raise ManifestError(f"embedding file not found: {p}")
    return read_embeddings(real_path), read_embeddings(synth_path)


def _build_config(args, fractions: tuple[float, ...], trials: int) -> SweepConfig:
    return SweepConfig(
        fractions=fractions,
        trials_per_fraction=trials,
        base_seed=args.seed,
        pairing=PairingSpec(pair_count=args.pairs, seed=args.seed),
        ssim_params=SsimParams(
            window_size=args.window_size, L=float(args.value_range)
        ),
    )


def _stanza(args, command: str, real: ImageSet, synth: ImageSet, embedder_id: str) -> dict:
    return {
        "command": command,
        "toolkit": {"name": "synthmetrics", "version": __version__},
        "manifest": args.manifest,
        "class": args.class_label,
        "seed": args.seed,
        "value_range": float(args.value_range),
        "pairing": {"pair_count": args.pairs, "exhaustive_threshold": PairingSpec().exhaustive_threshold},
        "ssim": {"window_size": args.window_size, "window_sigma": 1.5, "K1": 0.01, "K2": 0.03},
        "embedder_id": embedder_id,
        "counts": {"real": real.count, "synthetic": synth.count},
    }


def cmd_evaluate(args) -> int:
    out = _prepare_out_dir(args.out)
    manifest = _read_manifest(args.manifest)
    real, synth = _load_pair(manifest, args.class_label, args.value_range == "1")
    real_emb = synth_emb = None
    embedder_id = REF_EMBEDDER_ID
    if args.embedder.startswith("file:"):
        real_emb, synth_emb = _load_file_embeddings(args.embedder, args.class_label)
        embedder_id = real_emb.embedder_id
    elif args.embedder != "ref":
        raise ManifestError(f"--embedder must be 'ref' or 'file:<dir>', got {args.embedder!r}")
    config = _build_config(args, fractions=(1.0,), trials=1)
    result = run_sweep(
        real, synth, config, real_embeddings=real_emb, synth_embeddings=synth_emb
    )
    write_reports_csv(result.reports, out / "reports.csv")
    payload = _stanza(args, "evaluate", real, synth, embedder_id)
    payload["reports"] = [
        {
            "metric": r.metric_id,
            "provenance": r.provenance_compared,
            "value": r.value,
            "count": r.count,
            "seed": r.seed,
        }
        for r in result.reports
    ]
    write_aggregates_json(payload, out / "evaluation.json")
    return 0


def cmd_sweep(args) -> int:
    out = _prepare_out_dir(args.out)
    manifest = _read_manifest(args.manifest)
    real, synth = _load_pair(manifest, args.class_label, args.value_range == "1")
    real_emb = synth_emb = None
    embedder_id = REF_EMBEDDER_ID
    if args.embedder.startswith("file:"):
        real_emb, synth_emb = _load_file_embeddings(args.embedder, args.class_label)
        embedder_id = real_emb.embedder_id
    elif args.embedder != "ref":
        raise ManifestError(f"--embedder must be 'ref' or 'file:<dir>', got {args.embedder!r}")
    try:
        fractions = tuple(float(f) for f in args.fractions.split(","))
    except ValueError:
        raise ManifestError(f"--fractions must be comma-separated numbers, got {args.fractions!r}")
    config = _build_config(args, fractions=fractions, trials=args.trials)
    result = run_sweep(
        real, synth, config, real_embeddings=real_emb, synth_embeddings=synth_emb
    )
    write_reports_csv(result.reports, out / "reports.csv")
    payload = _stanza(args, "sweep", real, synth, embedder_id)
    payload["fractions"] = list(config.fractions)
    payload["trials_per_fraction"] = config.trials_per_fraction
    payload["aggregates"] = aggregates_to_dict(result)
    try:
        verdicts = stability_assessment(result)
        payload["stability"] = {m: v.to_dict() for m, v in verdicts.items()}
    except InsufficientTrialsError as exc:
        payload["stability"] = None
        payload["stability_skipped"] = str(exc)
    write_aggregates_json(payload, out / "aggregates.json")
    return 0


def cmd_embed(args) -> int:
    out = _prepare_out_dir(args.out)
    manifest = _read_manifest(args.manifest)
    provenances = (args.provenance,) if args.provenance else ("real", "synthetic")
    written = 0
    for provenance in provenances:
        try:
            image_set = manifest.load_set(args.class_label, provenance)
        except ManifestError:
            if args.provenance:
                raise
            continue
        matrix = embed_reference(image_set)
        write_embeddings(matrix, out / f"{args.class_label}_{provenance}.emb")
        written += 1
    if written == 0:
        raise ManifestError(
            f"manifest has no entry for class {args.class_label!r} in any provenance"
        )
    return 0


def cmd_convert(args) -> int:
    image_set = load_idx(args.idx_in)
    write_image_dir(image_set, args.dir_out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "evaluate": cmd_evaluate,
        "sweep": cmd_sweep,
        "embed": cmd_embed,
        "convert": cmd_convert,
    }
    try:
        return handlers[args.command](args)
    except (ManifestError, ValueError) as exc:
        # Bad parameter values (fractions, window size, pair counts) are
        # usage problems, same as unresolvable manifests.
        print(f"synthmetrics: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (SynthMetricsError, OSError) as exc:
        print(f"synthmetrics: {exc}", file=sys.stderr)
        return FAILURE_EXIT


if __name__ == "__main__":
    sys.exit(main())
