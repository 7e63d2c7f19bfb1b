"""Command-line entry point: pipeline subcommands over manifests, images,
embeddings, models and reports. Exit codes: 0 success, 2 usage, 3 manifest,
4 data format, 5 empty score class, 6 model format, 7 other toolkit error."""

from __future__ import annotations

import argparse
import sys

from ..core.errors import (
    EmptyClassError,
    FormatError,
    MadkitError,
    ManifestError,
    ModelFormatError,
)
from ..core.types import PostProcessing
from . import commands

EXIT_CODES = [
    (ManifestError, 3),
    (FormatError, 4),
    (EmptyClassError, 5),
    (ModelFormatError, 6),
    (MadkitError, 7),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="madkit",
        description="Differential morphing-attack-detection toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config",
                        help="YAML of flag values; entries override the "
                             "command-line flags")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    p = sub.add_parser("synth", help="generate a synthetic manifest + embeddings")
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--identities", type=int, default=50)
    p.add_argument("--refs", type=int, default=1)
    p.add_argument("--inputs", type=int, default=1)
    p.add_argument("--probes", type=int, default=2)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix", default="sub")
    p.set_defaults(func=commands.cmd_synth)

    p = sub.add_parser("protocol", help="validate manifest, derive morph pairs, "
                                        "enumerate comparisons")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--derive-morphs", action="store_true")
    p.add_argument("--tool", default="reference")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--contributors", choices=["both", "attacker"], default="both")
    p.set_defaults(func=commands.cmd_protocol)

    p = sub.add_parser("morph", help="create the manifest's morphs from images "
                                     "and landmarks")
    p.add_argument("--manifest", required=True)
    p.add_argument("--images", required=True, help="directory of <image_id>.png")
    p.add_argument("--landmarks", required=True, help="directory of <image_id>.lm")
    p.add_argument("--out", required=True)
    p.add_argument("--reblend-regions", action="store_true",
                   help="paste eye/nostril/hair regions of image A over the morph")
    p.add_argument("--replace-background", action="store_true",
                   help="keep image A's background outside the face hull")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=commands.cmd_morph)

    p = sub.add_parser("demorph", help="subtract a probe from a reference image")
    p.add_argument("--reference", required=True)
    p.add_argument("--probe", required=True)
    p.add_argument("--ref-landmarks", required=True)
    p.add_argument("--probe-landmarks", required=True)
    p.add_argument("--factor", type=float, default=0.3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=commands.cmd_demorph)

    p = sub.add_parser("degrade", help="apply a post-processing chain to images")
    p.add_argument("--images", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=[m.value for m in PostProcessing],
                   default="JP2")
    p.add_argument("--target-bytes", type=int, default=15360)
    p.add_argument("--noise-sigma", type=float, default=2.0)
    p.add_argument("--texture-amplitude", type=float, default=3.0)
    p.add_argument("--texture-scale", type=float, default=2.5)
    p.add_argument("--median-radius", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=commands.cmd_degrade)

    p = sub.add_parser("features", help="build a labeled classifier dataset")
    p.add_argument("--mode", choices=["difference", "lbp", "bsif", "landmarks"],
                   default="difference")
    p.add_argument("--comparisons", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--embeddings", help="embedding file (mode=difference)")
    p.add_argument("--ref-images", help="directory (modes lbp/bsif)")
    p.add_argument("--probe-images", help="directory (modes lbp/bsif)")
    p.add_argument("--cells", type=int, choices=[1, 4], default=1)
    p.add_argument("--bank", help="BSIF filter bank .npy (default: synthetic)")
    p.add_argument("--ref-landmarks", help="directory (mode=landmarks)")
    p.add_argument("--probe-landmarks", help="directory (mode=landmarks)")
    p.add_argument("--lm-mode", choices=["distances", "angles"],
                   default="distances")
    p.set_defaults(func=commands.cmd_features)

    p = sub.add_parser("train", help="train the RBF-SVM MAD classifier")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True, help="training manifest")
    p.add_argument("--test-manifest",
                   help="intended evaluation manifest (subject-overlap guard)")
    p.add_argument("--allow-overlap", action="store_true")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--gamma", default="auto")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--calibration-holdout", type=float, default=0.0)
    p.set_defaults(func=commands.cmd_train)

    p = sub.add_parser("score", help="score a feature dataset with a model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=commands.cmd_score)

    p = sub.add_parser("eval", help="detection metrics from a score file")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bpcer-target", type=float, default=0.10)
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(func=commands.cmd_eval)

    p = sub.add_parser("vuln", help="vulnerability assessment from embeddings")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fmr-target", type=float, default=0.001)
    p.set_defaults(func=commands.cmd_vuln)

    p = sub.add_parser("mds", help="2-D classical MDS of a feature dataset")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=commands.cmd_mds)

    return parser


def _apply_config(args) -> None:
    import yaml

    with open(args.config, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise FormatError(f"{args.config}: config must be a mapping")
    for key, value in doc.items():
        attr = str(key).replace("-", "_")
        if not hasattr(args, attr) or attr in ("func", "command", "config"):
            raise FormatError(f"{args.config}: unknown option '{key}' "
                              f"for command '{args.command}'")
        setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config(args)
        return args.func(args)
    except MadkitError as exc:
        for cls, code in EXIT_CODES:
            if isinstance(exc, cls):
                print(f"madkit {args.command}: error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
