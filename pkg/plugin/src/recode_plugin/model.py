"""A small transformer encoder classifier over the 10 bug types."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from . import BUG_TYPES
from .data import PAD, encode


@dataclass
class ModelConfig:
    vocab_size: int
    dim: int = 64
    heads: int = 4
    layers: int = 2
    feedforward: int = 128
    dropout: float = 0.1
    max_len: int = 48
    model_id: str = "scratch-mini-encoder"


class DescriptionClassifier(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(config.vocab_size, config.dim, padding_idx=PAD)
        self.position_embedding = nn.Embedding(config.max_len, config.dim)
        layer = nn.TransformerEncoderLayer(
            d_model=config.dim,
            nhead=config.heads,
            dim_feedforward=config.feedforward,
            dropout=config.dropout,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=config.layers)
        self.head = nn.Linear(config.dim, len(BUG_TYPES))

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device).unsqueeze(0)
        x = self.token_embedding(ids) + self.position_embedding(positions)
        mask = ids.eq(PAD)
        x = self.encoder(x, src_key_padding_mask=mask)
        return self.head(x[:, 0, :])


def save_model(model: DescriptionClassifier, vocab: dict[str, int],
               out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out / "model.pt")
    (out / "config.json").write_text(json.dumps(asdict(model.config), indent=1))
    (out / "vocab.json").write_text(json.dumps(vocab, ensure_ascii=False, indent=1))
    (out / "labels.json").write_text(json.dumps(list(BUG_TYPES), indent=1))
    return out


def load_model(model_dir: str | Path) -> tuple[DescriptionClassifier, dict[str, int]]:
    model_dir = Path(model_dir)
    config = ModelConfig(**json.loads((model_dir / "config.json").read_text()))
    vocab = json.loads((model_dir / "vocab.json").read_text())
    model = DescriptionClassifier(config)
    model.load_state_dict(torch.load(model_dir / "model.pt", map_location="cpu",
                                     weights_only=True))
    model.eval()
    return model, vocab


@torch.no_grad()
def predict_scores(model: DescriptionClassifier, vocab: dict[str, int],
                   text: str) -> list[tuple[str, float]]:
    """All 10 (type, confidence) pairs, sorted by descending confidence."""
    ids = torch.tensor([encode(text, vocab, model.config.max_len)], dtype=torch.long)
    probs = torch.softmax(model(ids)[0], dim=-1).tolist()
    order = {name: i for i, name in enumerate(BUG_TYPES)}
    ranked = sorted(zip(BUG_TYPES, probs), key=lambda p: (-p[1], order[p[0]]))
    return [(name, float(prob)) for name, prob in ranked]
