"""Command-line interface.

Subcommands: detect, classify, augment, gen-corpus, evaluate, validate.
Exit codes: 0 success, 1 fatal configuration or input error, 2 per-report
errors (partial results are still written).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import augment as augment_mod
from .classifier import evaluate_classifier, predict_top3, save_baseline, train_baseline
from .config import load_config, override
from .errors import RecodeError
from .harness import CorpusSpec, DEFAULT_TYPE_MIX, generate_corpus, write_results
from .pipeline import build_lexicons, build_model, detect_corpus, evaluate_detector
from .report import BugType, validate_corpus


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--lexicons", metavar="DIR", help="lexicon directory")
    parser.add_argument("--jobs", type=int, metavar="N", help="worker threads")
    parser.add_argument("--seed", type=int, metavar="U64", help="base random seed")
    parser.add_argument("--model", metavar="PATH", help="baseline model file (JSON)")
    parser.add_argument(
        "--classifier", choices=("baseline", "plugin"), help="classifier backend"
    )
    parser.add_argument("--plugin-cmd", metavar="STRING", help="classifier plugin command line")


def _config_from(args: argparse.Namespace):
    config = load_config(args.config)
    return override(
        config,
        lexicon_dir=args.lexicons,
        jobs=args.jobs,
        seed=args.seed,
        model_path=args.model,
        classifier=args.classifier,
        plugin_cmd=args.plugin_cmd,
    )


def cmd_detect(args: argparse.Namespace) -> int:
    config = _config_from(args)
    out = Path(args.out)
    try:
        records, errors = detect_corpus(args.corpus, config)
    except RecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    trace_path = args.trace or str(out.with_suffix(".trace.json"))
    write_results(records, out, trace_path, errors)
    for name, message in errors:
        print(f"warning: {name}: {message}", file=sys.stderr)
    print(f"wrote {out} ({len(records)} reports, {len(errors)} errors)")
    return 2 if errors else 0


def cmd_classify(args: argparse.Namespace) -> int:
    config = _config_from(args)
    if args.mode == "train":
        corpus = augment_mod.read_corpus(args.infile)
        model = train_baseline(corpus, smoothing=config.smoothing)
        save_baseline(model, args.out)
        print(f"wrote {args.out} ({len(corpus)} examples)")
        return 0
    model = build_model(config)
    if args.mode == "predict":
        prediction = predict_top3(model, args.text or "")
        print(json.dumps(
            [{"type": t.value, "confidence": c} for t, c in prediction.entries],
            indent=1,
        ))
        return 0
    corpus = augment_mod.read_corpus(args.infile)
    metrics = evaluate_classifier(model, corpus, k=args.k)
    print(json.dumps(metrics.to_dict(), indent=1))
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    config = _config_from(args)
    lexicons = build_lexicons(config)
    corpus = augment_mod.read_corpus(args.infile)
    plan_data = json.loads(Path(args.plan).read_text(encoding="utf-8"))
    per_type = {
        BugType.from_name(name): int(count)
        for name, count in plan_data["per_type_target"].items()
    }
    plan = augment_mod.AugmentationPlan(
        per_type_target=per_type, seed=int(plan_data.get("seed", config.seed))
    )
    result = augment_mod.balance_corpus(corpus, plan, lexicons)
    augment_mod.write_corpus(args.out, result.entries)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {args.out} ({len(result.entries)} entries)")
    return 0


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    config = _config_from(args)
    mix = dict(DEFAULT_TYPE_MIX)
    if args.mix:
        raw = json.loads(Path(args.mix).read_text(encoding="utf-8"))
        mix = {BugType.from_name(k): float(v) for k, v in raw.items()}
    spec = CorpusSpec(
        n_reports=args.n,
        per_type_mix=mix,
        consistent_fraction=args.consistent_fraction,
        tier=args.tier,
        image_dims=(args.width, args.height),
        seed=config.seed,
    )
    lexicons = build_lexicons(config)
    out = generate_corpus(spec, args.out, lexicons)
    print(f"wrote {spec.n_reports} bundles under {out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _config_from(args)
    try:
        metrics = evaluate_detector(args.corpus, config, out_dir=args.out)
    except RecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(metrics.to_dict(), indent=1))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    results = validate_corpus(args.corpus)
    bad = 0
    for report_id, issues in results:
        for issue in issues:
            bad += 1
            print(f"{report_id}: {issue}")
    print(f"{len(results)} bundles checked, {bad} issues")
    return 2 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recode",
        description="Check whether test report descriptions match their screenshots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run consistency detection over a corpus")
    _add_shared(p)
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--out", required=True, metavar="PATH", help="results CSV path")
    p.add_argument("--trace", metavar="PATH", help="trace JSON path")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("classify", help="train, evaluate, or query the classifier")
    _add_shared(p)
    p.add_argument("mode", choices=("train", "eval", "predict"))
    p.add_argument("--in", dest="infile", metavar="PATH", help="JSONL corpus")
    p.add_argument("--out", metavar="PATH", help="model output path (train)")
    p.add_argument("--text", metavar="STRING", help="description to classify (predict)")
    p.add_argument("--k", type=int, default=3, choices=(1, 2, 3), help="top-k cutoff (eval)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("augment", help="balance a labeled description corpus")
    _add_shared(p)
    p.add_argument("--in", dest="infile", required=True, metavar="PATH")
    p.add_argument("--plan", required=True, metavar="PATH", help="JSON plan file")
    p.add_argument("--out", required=True, metavar="PATH")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("gen-corpus", help="generate a synthetic labeled corpus")
    _add_shared(p)
    p.add_argument("--n", type=int, required=True, metavar="N")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--consistent-fraction", type=float, default=0.5)
    p.add_argument("--tier", choices=("noise-free", "noisy"), default="noise-free")
    p.add_argument("--width", type=int, default=270)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--mix", metavar="PATH", help="JSON per-type weight map")
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("evaluate", help="score detection against ground truth")
    _add_shared(p)
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--out", metavar="DIR", help="write results/trace/metrics here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("validate", help="check report bundles for issues")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
