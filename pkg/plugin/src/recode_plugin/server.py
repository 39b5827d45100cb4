"""stdio server for the classifier plugin protocol.

One handshake line, then exactly one JSON response per request line. A bad
request never kills the stream: it gets an error response carrying whatever
id could be recovered.
"""
from __future__ import annotations

import json
import sys

from . import PROTOCOL, PROTOCOL_VERSION
from .model import load_model, predict_scores


def _respond(out, payload: dict) -> None:
    out.write(json.dumps(payload, ensure_ascii=False) + "\n")
    out.flush()


def handle_line(line: str, model, vocab) -> dict:
    try:
        request = json.loads(line)
    except json.JSONDecodeError:
        return {"id": None, "error": "malformed JSON"}
    if not isinstance(request, dict):
        return {"id": None, "error": "request must be a JSON object"}
    request_id = request.get("id")
    if request.get("op") != "predict":
        return {"id": request_id, "error": f"unsupported op {request.get('op')!r}"}
    text = request.get("text")
    if not isinstance(text, str):
        return {"id": request_id, "error": "missing or non-string 'text'"}
    try:
        scores = predict_scores(model, vocab, text)
    except Exception as exc:  # never desynchronize the stream
        return {"id": request_id, "error": f"prediction failed: {exc}"}
    return {
        "id": request_id,
        "top": [{"type": name, "confidence": conf} for name, conf in scores],
    }


def serve(model_dir: str, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    model, vocab = load_model(model_dir)
    _respond(
        stdout,
        {
            "protocol": PROTOCOL,
            "version": PROTOCOL_VERSION,
            "model": model.config.model_id,
        },
    )
    for line in stdin:
        if not line.strip():
            continue
        _respond(stdout, handle_line(line, model, vocab))
    return 0
