"""Transformer classifier plugin for the recode pipeline.

Implements the `recode-classifier` stdio protocol: a handshake line followed
by one JSON response per request line. The model is a small transformer
encoder trained from scratch on a labeled description corpus; no pretrained
checkpoint or network access is needed, and any directory produced by
`finetune` can be served.
"""

__version__ = "0.1.0"

BUG_TYPES = (
    "functional-defect",
    "crash",
    "layout-problem",
    "display-problem",
    "network-error",
    "null-screen",
    "performance-problem",
    "error-prompt",
    "garbled-error",
    "transition-problem",
)

PROTOCOL = "recode-classifier"
PROTOCOL_VERSION = 1


class CorpusTooSmall(ValueError):
    """Raised when the training corpus covers fewer than two classes."""
