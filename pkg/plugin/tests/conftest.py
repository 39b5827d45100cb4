import contextlib
import io
import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from recode_plugin import BUG_TYPES
from recode_plugin.train import TrainConfig, finetune

SMOKE_TRAIN = TrainConfig(
    batch_size=8, learning_rate=1e-2, epochs=3, seed=1, dim=32, layers=1, dropout=0.0
)


def synthetic_corpus_rows(per_class: int, seed: int = 5):
    """Balanced 10-class corpus with disjoint per-class keyword pools, in the
    JSONL corpus schema the host pipeline reads and writes."""
    rng = random.Random(seed)
    rows = []
    for type_index, bug_type in enumerate(BUG_TYPES):
        pool = [f"kw{type_index}x{k}" for k in range(8)]
        for i in range(per_class):
            words = rng.sample(pool, 3)
            rows.append(
                {
                    "text": f"the {words[0]} and {words[1]} with {words[2]} case {i}",
                    "bug_type": bug_type,
                }
            )
    return rows


def write_corpus(path: Path, rows) -> Path:
    path.write_text("\n".join(json.dumps(row) for row in rows) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    return write_corpus(root / "corpus.jsonl", synthetic_corpus_rows(per_class=80))


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory, corpus_file):
    out = tmp_path_factory.mktemp("model") / "m"
    with contextlib.redirect_stdout(io.StringIO()):
        finetune(corpus_file, out, SMOKE_TRAIN)
    return out
