"""Embedding providers, cosine similarity, and the on-disk vector cache.

Two channels exist: ``code_token`` (token-level model) and ``sentence``
(sentence-level model, applied to comments only). A provider returns one
vector per input text, deterministically. Vectors are canonically float32:
that is what the wire protocol and the disk cache carry, so cached and
uncached runs are bitwise identical.

Providers:

* :class:`HashEmbedder` - offline, dependency-free: signed character n-gram
  (n = 1..3) hashing into a 256-dim L2-normalized vector. Used for tests and
  for running the pipeline without the model service.
* :class:`ServiceEmbedder` - HTTP client for the embedding service speaking
  ``POST /v1/embed`` / ``GET /healthz``.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
import time
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import requests

from .errors import EmbedError, ProtocolError, TransportError

log = logging.getLogger(__name__)

CODE_TOKEN = "code_token"
SENTENCE = "sentence"
CHANNELS = (CODE_TOKEN, SENTENCE)

DEFAULT_BATCH_SIZE = 32


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two equal-dimension vectors, clipped to [-1, 1].

    Returns 0.0 when either vector has zero norm (the degenerate-input
    convention: empty texts embed to the zero vector and score nothing).
    """
    if a.shape != b.shape:
        raise ValueError(f"dim mismatch: {a.shape} vs {b.shape}")
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    na = float(np.linalg.norm(a64))
    nb = float(np.linalg.norm(b64))
    if na == 0.0 or nb == 0.0:
        return 0.0
    val = float(np.dot(a64, b64) / (na * nb))
    return max(-1.0, min(1.0, val))


class HashEmbedder:
    """Deterministic offline embedder based on signed n-gram feature hashing.

    Character n-grams (n = 1..3) are hashed with keyed blake2b; the key is
    the channel name, so the two channels give distinct vectors for the same
    text. Hash bit 63 supplies the sign, so cosines between unrelated texts
    can go negative, exercising the clamping rule in scoring. The accumulated
    vector is L2-normalized in float64 and then quantized to float32.
    """

    provider_id = "hash-ngram-v1"

    def __init__(self, dim: int = 256):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = dim

    def dims(self) -> dict[str, int]:
        return {ch: self.dim for ch in CHANNELS}

    def embed(self, texts: Sequence[str], channel: str) -> list[np.ndarray]:
        if channel not in CHANNELS:
            raise ValueError(f"unknown channel {channel!r}")
        key = channel.encode("utf-8")
        return [self._embed_one(t, key) for t in texts]

    def _embed_one(self, text: str, key: bytes) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        if text:
            for n in (1, 2, 3):
                for i in range(len(text) - n + 1):
                    gram = text[i : i + n].encode("utf-8")
                    h = int.from_bytes(
                        hashlib.blake2b(gram, digest_size=8, key=key).digest(),
                        "little",
                    )
                    if (h >> 63) & 1:
                        vec[h % self.dim] += 1.0
                    else:
                        vec[h % self.dim] -= 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)


class ServiceEmbedder:
    """Client for the embedding service wire protocol.

    Requests are chunked into batches; transient transport failures are
    retried with bounded exponential backoff, after which a
    :class:`TransportError` is raised. Protocol violations (dim mismatch,
    malformed payload, non-finite values) raise :class:`ProtocolError`
    immediately - they are systemic, not per-text, failures.
    """

    def __init__(
        self,
        base_url: str,
        *,
        batch_size: int = DEFAULT_BATCH_SIZE,
        timeout: float = 30.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
        provider_id: str = "service",
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.provider_id = provider_id
        self._session = session or requests.Session()
        self._dims: dict[str, int] = {}

    def health(self) -> dict:
        try:
            resp = self._session.get(self.base_url + "/healthz", timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"health probe failed: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"service unhealthy: HTTP {resp.status_code}")
        return resp.json()

    def embed(self, texts: Sequence[str], channel: str) -> list[np.ndarray]:
        if channel not in CHANNELS:
            raise ValueError(f"unknown channel {channel!r}")
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            out.extend(self._embed_batch(list(texts[start : start + self.batch_size]), channel))
        return out

    def _embed_batch(self, batch: list[str], channel: str) -> list[np.ndarray]:
        if not batch:
            return []
        payload = {"channel": channel, "texts": batch}
        last_exc: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                resp = self._session.post(
                    self.base_url + "/v1/embed", json=payload, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if resp.status_code >= 500:
                last_exc = TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
                continue
            if resp.status_code != 200:
                raise ProtocolError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            return self._parse_response(resp, batch, channel)
        raise TransportError(
            f"embedding service unreachable after {self.max_attempts} attempts: {last_exc}"
        )

    def _parse_response(
        self, resp: requests.Response, batch: list[str], channel: str
    ) -> list[np.ndarray]:
        try:
            data = resp.json()
            dim = int(data["dim"])
            vectors = data["vectors"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(f"malformed embed response: {exc}") from exc
        if len(vectors) != len(batch):
            raise ProtocolError(
                f"response length {len(vectors)} does not match request length {len(batch)}"
            )
        known = self._dims.setdefault(channel, dim)
        if known != dim:
            raise ProtocolError(f"dim changed for channel {channel}: {known} -> {dim}")
        out = []
        for v in vectors:
            arr = np.asarray(v, dtype=np.float32)
            if arr.ndim != 1 or arr.shape[0] != dim:
                raise ProtocolError(f"vector of length {arr.shape} does not match dim {dim}")
            if not np.all(np.isfinite(arr)):
                raise ProtocolError("non-finite values in embed response")
            out.append(arr)
        return out


class EmbeddingCache:
    """Content-addressed on-disk vector cache.

    One file per (provider id, channel, text hash) under ``root``; the value
    is a little-endian uint32 dim followed by the raw float32 vector. A
    corrupt entry is treated as a miss with a warning, never as a failure.
    Writes go through a temp file + atomic rename so concurrent readers never
    observe a partial value.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _path(self, provider_id: str, channel: str, text: str) -> Path:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return self.root / provider_id / channel / f"{digest}.vec"

    def get(self, provider_id: str, channel: str, text: str) -> np.ndarray | None:
        path = self._path(provider_id, channel, text)
        try:
            blob = path.read_bytes()
        except FileNotFoundError:
            self.misses += 1
            return None
        if len(blob) < 4:
            log.warning("corrupt cache entry %s (too short); treating as miss", path)
            self.misses += 1
            return None
        (dim,) = struct.unpack("<I", blob[:4])
        if len(blob) != 4 + 4 * dim:
            log.warning("corrupt cache entry %s (bad length); treating as miss", path)
            self.misses += 1
            return None
        self.hits += 1
        return np.frombuffer(blob[4:], dtype="<f4").astype(np.float32, copy=True)

    def put(self, provider_id: str, channel: str, text: str, vec: np.ndarray) -> None:
        path = self._path(provider_id, channel, text)
        path.parent.mkdir(parents=True, exist_ok=True)
        blob = struct.pack("<I", vec.shape[0]) + vec.astype("<f4").tobytes()
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_bytes(blob)
        os.replace(tmp, path)


def cached_embed(text: str, channel: str, provider, cache: EmbeddingCache | None = None) -> np.ndarray:
    """Embed one text through the cache; hits are returned bitwise."""
    if cache is not None:
        hit = cache.get(provider.provider_id, channel, text)
        if hit is not None:
            return hit
    vec = provider.embed([text], channel)[0]
    if cache is not None:
        cache.put(provider.provider_id, channel, text, vec)
    return vec


def embed_unique(
    texts: Iterable[str],
    channel: str,
    provider,
    cache: EmbeddingCache | None = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Embed the distinct texts of ``texts`` in first-seen order.

    Returns ``(vectors, failures)``: per-text failures (:class:`EmbedError`
    or non-finite vectors) are isolated by retrying the affected batch one
    text at a time, so one poison text cannot take down its batch. Systemic
    provider errors propagate.
    """
    unique = list(dict.fromkeys(texts))
    vectors: dict[str, np.ndarray] = {}
    failures: dict[str, str] = {}

    pending: list[str] = []
    if cache is not None:
        for t in unique:
            hit = cache.get(provider.provider_id, channel, t)
            if hit is not None:
                vectors[t] = hit
            else:
                pending.append(t)
    else:
        pending = unique

    for start in range(0, len(pending), batch_size):
        batch = pending[start : start + batch_size]
        try:
            got = provider.embed(batch, channel)
            pairs = list(zip(batch, got, strict=True))
        except EmbedError:
            pairs = []
            for t in batch:
                try:
                    pairs.append((t, provider.embed([t], channel)[0]))
                except EmbedError as exc:
                    failures[t] = str(exc)
        for t, vec in pairs:
            if not np.all(np.isfinite(vec)):
                failures[t] = "non-finite embedding"
                continue
            vectors[t] = vec
            if cache is not None:
                cache.put(provider.provider_id, channel, t, vec)
    return vectors, failures
