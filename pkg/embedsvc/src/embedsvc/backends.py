"""Embedding backends: the deterministic hash backend and the model backends.

A backend answers ``embed(texts) -> (vectors, truncated_flags)`` for one
channel with a fixed ``dim``. The hash backend restates the signed n-gram
hashing definition shared with the pipeline's offline embedder; the
conformance fixture pins both implementations bit for bit, so neither can
drift. The transformer backends load real checkpoints and are therefore
optional at import time.
"""

from __future__ import annotations

import hashlib
import threading

import numpy as np

from .config import ChannelConfig


class BackendLoadError(RuntimeError):
    """A channel's model could not be loaded; the service reports unhealthy."""


class HashBackend:
    """Signed character n-gram (n = 1..3) hashing, keyed by channel name.

    Inputs longer than ``max_length`` characters are truncated and flagged,
    mirroring the transformer backends' token truncation.
    """

    def __init__(self, config: ChannelConfig, dim: int = 256):
        self.config = config
        self.dim = dim
        self._key = config.channel.encode("utf-8")

    def embed(self, texts: list[str]) -> tuple[list[list[float]], list[bool]]:
        vectors = []
        truncated = []
        for text in texts:
            cut = text[: self.config.max_length]
            truncated.append(len(text) > self.config.max_length)
            vectors.append(self._one(cut))
        return vectors, truncated

    def _one(self, text: str) -> list[float]:
        vec = np.zeros(self.dim, dtype=np.float64)
        for n in (1, 2, 3):
            for i in range(len(text) - n + 1):
                gram = text[i : i + n].encode("utf-8")
                h = int.from_bytes(
                    hashlib.blake2b(gram, digest_size=8, key=self._key).digest(), "little"
                )
                if (h >> 63) & 1:
                    vec[h % self.dim] += 1.0
                else:
                    vec[h % self.dim] -= 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return [float(v) for v in vec.astype(np.float32)]


class TokenModelBackend:
    """Transformer encoder with masked mean pooling over final hidden states.

    Used for the token-level channel. Inference runs under a lock in eval
    mode with gradients disabled, so responses are independent of request
    interleaving.
    """

    def __init__(self, config: ChannelConfig, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - exercised without extras
            raise BackendLoadError(f"transformer backend unavailable: {exc}") from exc
        if config.pooling != "mean":
            raise BackendLoadError(f"unsupported pooling {config.pooling!r}")
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(config.model_id)
            self._model = AutoModel.from_pretrained(config.model_id).to(device).eval()
        except Exception as exc:  # pragma: no cover - needs network/checkpoints
            raise BackendLoadError(f"cannot load {config.model_id!r}: {exc}") from exc
        self._torch = torch
        self.config = config
        self.device = device
        self.dim = int(self._model.config.hidden_size)
        self._lock = threading.Lock()

    def embed(self, texts: list[str]) -> tuple[list[list[float]], list[bool]]:
        torch = self._torch
        lengths = [
            len(self._tokenizer.encode(t, add_special_tokens=True)) for t in texts
        ]
        truncated = [n > self.config.max_length for n in lengths]
        with self._lock, torch.no_grad():
            batch = self._tokenizer(
                texts,
                padding=True,
                truncation=True,
                max_length=self.config.max_length,
                return_tensors="pt",
            ).to(self.device)
            hidden = self._model(**batch).last_hidden_state
            mask = batch["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            summed = (hidden * mask).sum(dim=1)
            counts = mask.sum(dim=1).clamp(min=1)
            pooled = (summed / counts).cpu().numpy().astype(np.float32)
        return [[float(v) for v in row] for row in pooled], truncated


class SentenceModelBackend:
    """Sentence-encoder backend for the sentence channel."""

    def __init__(self, config: ChannelConfig, device: str = "cpu"):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:  # pragma: no cover - exercised without extras
            raise BackendLoadError(f"sentence backend unavailable: {exc}") from exc
        try:
            self._model = SentenceTransformer(config.model_id, device=device)
        except Exception as exc:  # pragma: no cover - needs network/checkpoints
            raise BackendLoadError(f"cannot load {config.model_id!r}: {exc}") from exc
        self._model.max_seq_length = config.max_length
        self.config = config
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self._lock = threading.Lock()

    def embed(self, texts: list[str]) -> tuple[list[list[float]], list[bool]]:
        tokenizer = getattr(self._model, "tokenizer", None)
        if tokenizer is not None:
            truncated = [
                len(tokenizer.encode(t, add_special_tokens=True)) > self.config.max_length
                for t in texts
            ]
        else:  # pragma: no cover - tokenizer-less models
            truncated = [False] * len(texts)
        with self._lock:
            vectors = self._model.encode(
                texts, convert_to_numpy=True, show_progress_bar=False
            ).astype(np.float32)
        return [[float(v) for v in row] for row in vectors], truncated


def build_backends(service_config) -> dict:
    """Instantiate one backend per channel per the configured kind."""
    from .config import CHANNELS

    backends = {}
    for name in CHANNELS:
        channel_config = service_config.channel(name)
        if service_config.backend == "hash":
            backends[name] = HashBackend(channel_config, dim=service_config.hash_dim)
        elif service_config.backend == "transformer":
            if name == "sentence":
                backends[name] = SentenceModelBackend(channel_config, service_config.device)
            else:
                backends[name] = TokenModelBackend(channel_config, service_config.device)
        else:
            raise BackendLoadError(f"unknown backend {service_config.backend!r}")
    return backends
