"""Command-line interface: ``train`` and ``embed``."""

from __future__ import annotations

import argparse
import sys

from .config import ClassSource, GanConfig, load_config
from .embeddings import EncoderUnavailableError, export_deep_embeddings
from .train import TrainingDiverged, train_and_generate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gan-trainer",
        description="Train a per-class DCGAN and export synthetic images/embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one class and export synthetic images")
    p_train.add_argument("--config", help="YAML config mirroring GanConfig")
    p_train.add_argument("--data", help="IDX file or PNG directory of real images")
    p_train.add_argument("--format", choices=("idx", "image_dir"), default="idx")
    p_train.add_argument("--class", dest="class_label", default="unlabeled")
    p_train.add_argument("--out", help="output directory")
    p_train.add_argument("--epochs", type=int)
    p_train.add_argument("--batch-size", type=int)
    p_train.add_argument("--latent-dim", type=int)
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--count", type=int, help="synthetic count (default: real count)")

    p_embed = sub.add_parser("embed", help="encode a PNG directory into an EMB1 file")
    p_embed.add_argument("--images", required=True)
    p_embed.add_argument("--out", required=True)
    p_embed.add_argument("--encoder", choices=("resnet18", "random-cnn"), default="resnet18")
    p_embed.add_argument("--batch-size", type=int, default=64)

    return parser


def _config_from_args(args) -> GanConfig:
    if args.config:
        config = load_config(args.config)
    else:
        if not args.data or not args.out:
            raise ValueError("either --config or both --data and --out are required")
        config = GanConfig(
            class_source=ClassSource(
                path=args.data, format=args.format, class_label=args.class_label
            ),
            out_dir=args.out,
        )
    for attr, value in (
        ("epochs", args.epochs),
        ("batch_size", args.batch_size),
        ("latent_dim", args.latent_dim),
        ("seed", args.seed),
        ("output_count", args.count),
    ):
        if value is not None:
            setattr(config, attr, value)
    if args.config and args.out:
        config.out_dir = args.out
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            summary = _config_from_args(args)
            result = train_and_generate(summary)
            print(
                f"wrote {result['synthetic_count']} synthetic images to "
                f"{result['synthetic_dir']} (real count {result['real_count']})"
            )
            print(f"checkpoint: {result['checkpoint']}; losses: {result['losses_csv']}")
        else:
            path = export_deep_embeddings(
                args.images, args.out, encoder=args.encoder, batch_size=args.batch_size
            )
            print(f"wrote embeddings to {path}")
        return 0
    except TrainingDiverged as exc:
        print(f"gan-trainer: {exc}", file=sys.stderr)
        return 1
    except EncoderUnavailableError as exc:
        print(f"gan-trainer: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"gan-trainer: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
