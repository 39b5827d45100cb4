"""Training loop: fit the classifier on a labeled JSONL corpus."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from . import BUG_TYPES
from .data import build_vocab, encode, read_jsonl
from .model import DescriptionClassifier, ModelConfig, save_model


@dataclass
class TrainConfig:
    batch_size: int = 32
    learning_rate: float = 5e-5
    epochs: int = 30
    seed: int = 0
    dim: int = 64
    heads: int = 4
    layers: int = 2
    dropout: float = 0.1
    max_len: int = 48
    val_fraction: float = 0.2
    test_fraction: float = 0.2


def _split(rows, train_config: TrainConfig):
    """Stratified 6:2:2-style split, seeded."""
    rng = random.Random(train_config.seed)
    by_type: dict[str, list] = {}
    for row in rows:
        by_type.setdefault(row[1], []).append(row)
    train, val, test = [], [], []
    for bug_type in BUG_TYPES:
        bucket = by_type.get(bug_type, [])
        rng.shuffle(bucket)
        n_val = int(len(bucket) * train_config.val_fraction)
        n_test = int(len(bucket) * train_config.test_fraction)
        val.extend(bucket[:n_val])
        test.extend(bucket[n_val : n_val + n_test])
        train.extend(bucket[n_val + n_test :])
    rng.shuffle(train)
    return train, val, test


def _batches(rows, vocab, max_len, batch_size, rng):
    order = list(range(len(rows)))
    rng.shuffle(order)
    label_index = {name: i for i, name in enumerate(BUG_TYPES)}
    for start in range(0, len(order), batch_size):
        chunk = [rows[i] for i in order[start : start + batch_size]]
        ids = torch.tensor([encode(text, vocab, max_len) for text, _ in chunk])
        labels = torch.tensor([label_index[bug_type] for _, bug_type in chunk])
        yield ids, labels


@torch.no_grad()
def accuracy(model, vocab, rows, max_len, k: int = 1) -> float:
    if not rows:
        return 0.0
    label_index = {name: i for i, name in enumerate(BUG_TYPES)}
    ids = torch.tensor([encode(text, vocab, max_len) for text, _ in rows])
    logits = model(ids)
    topk = logits.topk(k, dim=-1).indices
    labels = torch.tensor([label_index[bug_type] for _, bug_type in rows])
    return float((topk == labels.unsqueeze(1)).any(dim=1).float().mean())


def finetune(corpus_path: str | Path, out_dir: str | Path,
             train_config: TrainConfig | None = None) -> Path:
    """Train on the corpus and write a reloadable model directory.

    Prints one validation-accuracy line per epoch and records the effective
    hyperparameters in `train_config.json`. Training runs single-threaded so a
    fixed seed reproduces the same weights regardless of host thread count.
    """
    train_config = train_config or TrainConfig()
    rows = read_jsonl(corpus_path)
    torch.set_num_threads(1)
    torch.manual_seed(train_config.seed)
    rng = random.Random(train_config.seed + 1)

    train, val, test = _split(rows, train_config)
    vocab = build_vocab(train or rows)
    model_config = ModelConfig(
        vocab_size=len(vocab),
        dim=train_config.dim,
        heads=train_config.heads,
        layers=train_config.layers,
        dropout=train_config.dropout,
        max_len=train_config.max_len,
    )
    model = DescriptionClassifier(model_config)
    optimizer = torch.optim.Adam(model.parameters(), lr=train_config.learning_rate)
    loss_fn = nn.CrossEntropyLoss()

    for epoch in range(1, train_config.epochs + 1):
        model.train()
        total_loss = 0.0
        for ids, labels in _batches(train, vocab, train_config.max_len,
                                    train_config.batch_size, rng):
            optimizer.zero_grad()
            loss = loss_fn(model(ids), labels)
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach()) * len(labels)
        model.eval()
        val_acc = accuracy(model, vocab, val or train, train_config.max_len)
        print(
            f"epoch {epoch}/{train_config.epochs} "
            f"loss {total_loss / max(1, len(train)):.4f} val_acc {val_acc:.4f}",
            flush=True,
        )

    model.eval()
    out = save_model(model, vocab, out_dir)
    summary = {
        "batch_size": train_config.batch_size,
        "learning_rate": train_config.learning_rate,
        "epochs": train_config.epochs,
        "seed": train_config.seed,
        "train_size": len(train),
        "val_size": len(val),
        "test_size": len(test),
        "final_val_accuracy": accuracy(model, vocab, val or train, train_config.max_len),
        "final_test_top3_accuracy": accuracy(model, vocab, test or train,
                                             train_config.max_len, k=3),
    }
    (out / "train_config.json").write_text(json.dumps(summary, indent=1))
    return out
