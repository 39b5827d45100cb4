"""Protocol conformance: handshake, request/response pairing, fuzz robustness."""
import json
import random
import subprocess
import sys

import pytest

from recode_plugin import BUG_TYPES, PROTOCOL, PROTOCOL_VERSION


@pytest.fixture(scope="module")
def server(model_dir):
    proc = subprocess.Popen(
        [sys.executable, "-m", "recode_plugin", "serve", "--model", str(model_dir)],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
        bufsize=1,
    )
    handshake = json.loads(proc.stdout.readline())
    yield proc, handshake
    proc.stdin.close()
    proc.terminate()
    proc.wait(timeout=10)


def ask(proc, line: str) -> dict:
    proc.stdin.write(line + "\n")
    proc.stdin.flush()
    return json.loads(proc.stdout.readline())


class TestHandshake:
    def test_protocol_constants(self, server):
        _, handshake = server
        assert handshake["protocol"] == PROTOCOL
        assert handshake["version"] == PROTOCOL_VERSION

    def test_model_identifier_recorded(self, server):
        _, handshake = server
        assert isinstance(handshake.get("model"), str) and handshake["model"]


class TestPredict:
    def test_sorted_full_distribution(self, server):
        proc, _ = server
        response = ask(proc, json.dumps({"id": "p1", "op": "predict",
                                         "text": "the kw1x0 and kw1x1 case"}))
        assert response["id"] == "p1"
        top = response["top"]
        assert len(top) >= 3
        confs = [entry["confidence"] for entry in top]
        assert confs == sorted(confs, reverse=True)
        assert all(entry["type"] in BUG_TYPES for entry in top)
        assert abs(sum(confs) - 1.0) < 1e-6

    def test_crash_pool_text_ranks_crash_first(self, server):
        proc, _ = server
        crash_index = BUG_TYPES.index("crash")
        response = ask(proc, json.dumps({
            "id": "p2", "op": "predict",
            "text": f"the kw{crash_index}x0 and kw{crash_index}x3 with kw{crash_index}x5",
        }))
        assert response["top"][0]["type"] == "crash"
        assert response["top"][0]["confidence"] > 0.1

    def test_missing_text_is_error_and_stream_survives(self, server):
        proc, _ = server
        response = ask(proc, json.dumps({"id": "p3", "op": "predict"}))
        assert response["id"] == "p3"
        assert "error" in response
        follow_up = ask(proc, json.dumps({"id": "p4", "op": "predict", "text": "ok"}))
        assert follow_up["id"] == "p4"
        assert "top" in follow_up


class TestFuzz:
    def test_thousand_fuzzed_lines_no_desync(self, server):
        proc, _ = server
        rng = random.Random(2024)
        pending = []
        for i in range(1000):
            kind = rng.randrange(6)
            request_id = f"f{i}"
            if kind == 0:  # valid predict
                line = json.dumps({"id": request_id, "op": "predict",
                                   "text": f"case {i} kw{rng.randrange(10)}x{rng.randrange(8)}"})
                pending.append((request_id, "top"))
            elif kind == 1:  # missing text
                line = json.dumps({"id": request_id, "op": "predict"})
                pending.append((request_id, "error"))
            elif kind == 2:  # unknown op
                line = json.dumps({"id": request_id, "op": "ocr", "x": i})
                pending.append((request_id, "error"))
            elif kind == 3:  # invalid JSON
                line = '{"id": "' + request_id + '", "op": '
                pending.append((None, "error"))
            elif kind == 4:  # non-object JSON
                line = json.dumps([request_id, "predict"])
                pending.append((None, "error"))
            else:  # valid predict with unicode and long text
                line = json.dumps({"id": request_id, "op": "predict",
                                   "text": ("白屏 " + "kw0x0 " * rng.randrange(30))})
                pending.append((request_id, "top"))
            proc.stdin.write(line + "\n")
        proc.stdin.flush()
        for expect_id, expect_field in pending:
            response = json.loads(proc.stdout.readline())
            assert response.get("id") == expect_id, (expect_id, response)
            assert expect_field in response, (expect_field, response)
