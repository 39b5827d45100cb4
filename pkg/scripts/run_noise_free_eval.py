#!/usr/bin/env python3
"""Generate a noise-free synthetic corpus and score the full pipeline on it.

Expected output: accuracy 1.0 (the tier is constructed to be perfectly
decidable by the default configuration).
"""
import argparse
import json
import tempfile
from pathlib import Path

from recode.classifier import train_baseline
from recode.harness import CorpusSpec, generate_corpus, template_corpus
from recode.lexicon import load_lexicons
from recode.pipeline import evaluate_detector


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--seed", type=int, default=20260809)
    parser.add_argument("--consistent-fraction", type=float, default=0.5)
    parser.add_argument("--out", type=Path, help="corpus dir (default: temp)")
    args = parser.parse_args()

    lexicons = load_lexicons()
    out = args.out or Path(tempfile.mkdtemp(prefix="recode-noise-free-"))
    spec = CorpusSpec(
        n_reports=args.n,
        seed=args.seed,
        consistent_fraction=args.consistent_fraction,
    )
    generate_corpus(spec, out, lexicons)
    model = train_baseline(template_corpus(60, seed=0))
    metrics = evaluate_detector(out, model=model, out_dir=out / "_eval")
    print(json.dumps(metrics.to_dict(), indent=1))
    print(f"corpus: {out}")


if __name__ == "__main__":
    main()
