"""Entry point: `python -m recode_plugin {finetune,serve}`."""
import argparse
import sys

from . import CorpusTooSmall
from .server import serve
from .train import TrainConfig, finetune


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="recode_plugin")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune", help="train a model on a labeled JSONL corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="model directory to write")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=5e-5)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--dropout", type=float, default=0.1)

    p = sub.add_parser("serve", help="answer predict requests over stdio")
    p.add_argument("--model", required=True, help="model directory from finetune")

    args = parser.parse_args(argv)
    if args.command == "serve":
        return serve(args.model)
    config = TrainConfig(
        batch_size=args.batch_size,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
        dim=args.dim,
        layers=args.layers,
        dropout=args.dropout,
    )
    try:
        out = finetune(args.infile, args.out, config)
    except CorpusTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote model to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
