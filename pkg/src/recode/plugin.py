"""Line-delimited JSON stdio transport for external plugins.

Three plugin roles share one transport: classifiers (`recode-classifier`),
OCR backends (`recode-ocr`) and widget typers. A plugin process prints a
handshake line first, then answers one JSON request per line, echoing the
request id. Any malformed traffic surfaces as PluginUnavailable (or
OcrFailure for the OCR role, which the pixel pipeline degrades on).
"""
from __future__ import annotations

import base64
import io
import json
import selectors
import shlex
import subprocess
import threading
import itertools

import numpy as np
from PIL import Image

from .errors import OcrFailure, PluginUnavailable
from .report import BBox, BugType, TextRegion, TopKPrediction

CLASSIFIER_PROTOCOL = "recode-classifier"
OCR_PROTOCOL = "recode-ocr"
PROTOCOL_VERSION = 1

_DEFAULT_TIMEOUT = 60.0


class PluginProcess:
    """One long-running plugin subprocess with serialized request access."""

    def __init__(self, command: str, protocol: str, timeout: float = _DEFAULT_TIMEOUT):
        self.command = command
        self.protocol = protocol
        self.timeout = timeout
        self._lock = threading.Lock()
        self._ids = itertools.count(1)
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise PluginUnavailable(f"cannot start plugin {command!r}: {exc}") from exc
        handshake = self._read_line()
        try:
            head = json.loads(handshake)
        except json.JSONDecodeError as exc:
            self.close()
            raise PluginUnavailable(f"bad handshake line: {handshake!r}") from exc
        if head.get("protocol") != protocol or head.get("version") != PROTOCOL_VERSION:
            self.close()
            raise PluginUnavailable(
                f"plugin speaks {head.get('protocol')!r} v{head.get('version')!r}, "
                f"expected {protocol!r} v{PROTOCOL_VERSION}"
            )
        self.handshake = head

    def _read_line(self) -> str:
        stdout = self._proc.stdout
        assert stdout is not None
        sel = selectors.DefaultSelector()
        sel.register(stdout, selectors.EVENT_READ)
        try:
            if not sel.select(timeout=self.timeout):
                raise PluginUnavailable(f"plugin {self.command!r}: response timeout")
        finally:
            sel.close()
        line = stdout.readline()
        if not line:
            raise PluginUnavailable(f"plugin {self.command!r}: stream closed")
        return line

    def request(self, op: str, payload: dict) -> dict:
        """Send one request and return its matching response object."""
        with self._lock:
            if self._proc.poll() is not None:
                raise PluginUnavailable(f"plugin {self.command!r}: process exited")
            request_id = f"r{next(self._ids)}"
            message = {"id": request_id, "op": op, **payload}
            stdin = self._proc.stdin
            assert stdin is not None
            try:
                stdin.write(json.dumps(message, ensure_ascii=False) + "\n")
                stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise PluginUnavailable(f"plugin {self.command!r}: pipe broken") from exc
            line = self._read_line()
            try:
                response = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PluginUnavailable(f"malformed plugin response: {line!r}") from exc
            if not isinstance(response, dict) or response.get("id") != request_id:
                raise PluginUnavailable(
                    f"response id mismatch: sent {request_id!r}, got {response!r}"
                )
            return response

    def close(self) -> None:
        proc = getattr(self, "_proc", None)
        if proc is None:
            return
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.terminate()
            proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            proc.kill()

    def __del__(self):  # best effort
        try:
            self.close()
        except Exception:
            pass


class PluginClassifier:
    """Classifier backed by an external plugin process."""

    def __init__(self, command: str, timeout: float = _DEFAULT_TIMEOUT):
        self.process = PluginProcess(command, CLASSIFIER_PROTOCOL, timeout)

    def predict_top3(self, text: str) -> TopKPrediction:
        response = self.process.request("predict", {"text": text})
        if "error" in response:
            raise PluginUnavailable(f"plugin error: {response['error']}")
        top = response.get("top")
        if not isinstance(top, list) or len(top) < 3:
            raise PluginUnavailable(f"plugin returned {top!r}, need >= 3 entries")
        entries = []
        seen = set()
        for item in top:
            try:
                bug_type = BugType.from_name(item["type"])
                confidence = float(item["confidence"])
            except (KeyError, TypeError, ValueError) as exc:
                raise PluginUnavailable(f"bad prediction entry {item!r}") from exc
            if not (0.0 <= confidence <= 1.0):
                raise PluginUnavailable(f"confidence out of range in {item!r}")
            if bug_type in seen:
                raise PluginUnavailable(f"duplicate type in plugin response: {item!r}")
            seen.add(bug_type)
            entries.append((bug_type, confidence))
        entries.sort(key=lambda e: (-e[1], e[0].order))
        return TopKPrediction(entries=tuple(entries[:3]))

    def close(self) -> None:
        self.process.close()


def _png_base64(image: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(image, mode="RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


class PluginTyper:
    """Widget typer backed by an external plugin over the classifier transport.

    Request: `{"id", "op": "type_widget", "image_png_base64"}` for the widget
    crop; response: `{"id", "kind": <name or null>}`.
    """

    def __init__(self, command: str, timeout: float = _DEFAULT_TIMEOUT):
        self.process = PluginProcess(command, CLASSIFIER_PROTOCOL, timeout)

    def __call__(self, image: np.ndarray, bbox, text: str | None) -> str | None:
        crop = image[bbox.y : bbox.bottom, bbox.x : bbox.right]
        response = self.process.request(
            "type_widget", {"image_png_base64": _png_base64(crop)}
        )
        if "error" in response:
            raise PluginUnavailable(f"typer plugin error: {response['error']}")
        kind = response.get("kind")
        if kind is not None and not isinstance(kind, str):
            raise PluginUnavailable(f"bad typer response: {response!r}")
        return kind

    def close(self) -> None:
        self.process.close()


class PluginOcr:
    """OCR backend backed by an external plugin process."""

    def __init__(self, command: str, timeout: float = _DEFAULT_TIMEOUT):
        try:
            self.process = PluginProcess(command, OCR_PROTOCOL, timeout)
        except PluginUnavailable as exc:
            raise OcrFailure(str(exc)) from exc

    def __call__(self, report) -> list[TextRegion]:
        try:
            response = self.process.request(
                "ocr", {"image_png_base64": _png_base64(report.screenshot)}
            )
        except PluginUnavailable as exc:
            raise OcrFailure(str(exc)) from exc
        texts = response.get("texts")
        if not isinstance(texts, list):
            raise OcrFailure(f"bad OCR response: {response!r}")
        regions = []
        try:
            for item in texts:
                regions.append(
                    TextRegion(
                        bbox=BBox(int(item["x"]), int(item["y"]), int(item["w"]), int(item["h"])),
                        text=str(item["text"]),
                    )
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise OcrFailure(f"bad OCR entry: {exc}") from exc
        return regions

    def close(self) -> None:
        self.process.close()
