#!/usr/bin/env python3
"""Generate the shared embed-protocol conformance fixture.

The fixture pins request/response pairs for the ``POST /v1/embed`` wire
contract using the deterministic signed n-gram hash embedder. Both the
client-side offline embedder and the service's hash backend must reproduce
these vectors bit for bit; the hashing definition is restated here on
purpose so neither implementation can drift silently.

Usage: python scripts/gen_protocol_fixture.py [out.json]
"""

import hashlib
import json
import sys
from pathlib import Path

import numpy as np

DIM = 256
PROVIDER = "hash-ngram-v1"


def hash_embed(text: str, channel: str) -> list[float]:
    key = channel.encode("utf-8")
    vec = np.zeros(DIM, dtype=np.float64)
    for n in (1, 2, 3):
        for i in range(len(text) - n + 1):
            gram = text[i : i + n].encode("utf-8")
            h = int.from_bytes(hashlib.blake2b(gram, digest_size=8, key=key).digest(), "little")
            if (h >> 63) & 1:
                vec[h % DIM] += 1.0
            else:
                vec[h % DIM] -= 1.0
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return [float(v) for v in vec.astype(np.float32)]


CASES = [
    ("code_token", ["returns the value .", "", "if ( x > 0 )"]),
    ("code_token", ["b", "a"]),
    ("sentence", ["returns the value ."]),
    ("sentence", ["日本語のコメント", "updated comment text"]),
    ("code_token", ["old value new location"]),
]


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "conformance" / "embed_protocol.json"
    )
    fixture = {
        "provider": PROVIDER,
        "dim": DIM,
        "cases": [
            {
                "request": {"channel": channel, "texts": texts},
                "response": {"dim": DIM, "vectors": [hash_embed(t, channel) for t in texts]},
            }
            for channel, texts in CASES
        ],
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
