"""Service configuration: one entry per embedding channel plus server knobs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

CODE_TOKEN = "code_token"
SENTENCE = "sentence"
CHANNELS = (CODE_TOKEN, SENTENCE)

DEFAULT_CODE_MODEL = "microsoft/graphcodebert-base"
DEFAULT_SENTENCE_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


@dataclass
class ChannelConfig:
    """How one channel embeds text.

    ``model_id`` is a checkpoint string for the transformer backend (any
    drop-in compatible checkpoint works) and is informational for the hash
    backend. ``max_length`` is in model tokens (characters for the hash
    backend); longer inputs are truncated, never rejected, and flagged in the
    response. ``pooling`` is pinned in config so it can be swapped:
    ``mean`` is masked mean pooling over final-layer token states.
    """

    channel: str
    model_id: str
    max_length: int = 512
    pooling: str = "mean"


@dataclass
class ServiceConfig:
    backend: str = "transformer"  # "transformer" | "hash"
    host: str = "127.0.0.1"
    port: int = 8080
    device: str = "cpu"
    max_batch: int = 64
    hash_dim: int = 256
    code: ChannelConfig = field(
        default_factory=lambda: ChannelConfig(CODE_TOKEN, DEFAULT_CODE_MODEL)
    )
    sentence: ChannelConfig = field(
        default_factory=lambda: ChannelConfig(SENTENCE, DEFAULT_SENTENCE_MODEL)
    )

    def channel(self, name: str) -> ChannelConfig:
        if name == CODE_TOKEN:
            return self.code
        if name == SENTENCE:
            return self.sentence
        raise KeyError(name)


def load_config(path: str | Path) -> ServiceConfig:
    """Read a JSON config file; missing keys keep their defaults."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    config = ServiceConfig()
    for key in ("backend", "host", "port", "device", "max_batch", "hash_dim"):
        if key in raw:
            setattr(config, key, raw[key])
    for name, attr in ((CODE_TOKEN, "code"), (SENTENCE, "sentence")):
        if name in raw:
            entry = raw[name]
            channel = getattr(config, attr)
            for key in ("model_id", "max_length", "pooling"):
                if key in entry:
                    setattr(channel, key, entry[key])
    return config
