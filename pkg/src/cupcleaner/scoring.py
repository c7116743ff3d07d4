"""Per-sample quality scoring: semantic, diff-semantic, and overlap channels.

For a sample with old/new comment ``c`` and old/new code ``s``:

* ``c_token`` - cosine of token-level embeddings of old vs new comment
* ``c_sent``  - cosine of sentence-level embeddings of old vs new comment
* ``s_token`` - cosine of token-level embeddings of old vs new code
* ``s1 = c_token * c_sent * s_token``
* ``d``  - cosine of token-level embeddings of the joined comment-diff and
  code-diff strings; ``s2 = d * max(c_token, s_token)``
* ``o``  - character-LCS overlap of comment-diff words against code-diff
  words; ``s3 = o * max(c_token, s_token)``
* ``final = max(s1, s2, s3)``

Raw cosines are clamped to [0, 1] before any product (configurable), so two
negative similarities can never multiply into a spuriously high score and
every field of the breakdown lies in [0, 1].
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import Sample
from .embedding import (
    CODE_TOKEN,
    DEFAULT_BATCH_SIZE,
    SENTENCE,
    EmbeddingCache,
    cached_embed,
    cosine,
    embed_unique,
)
from .errors import EmbedError
from .textdiff import CODE, COMMENT, overlap_score, tokenize, word_diff

SCORE_FIELDS = ("c_token", "c_sent", "s_token", "s1", "d", "s2", "o", "s3", "final")
CSV_HEADER = ("id",) + SCORE_FIELDS


@dataclass
class ScoreBreakdown:
    """All intermediate quantities and the final score for one sample."""

    sample_id: str
    c_token: float
    c_sent: float
    s_token: float
    s1: float
    d: float
    s2: float
    o: float
    s3: float
    final: float


@dataclass
class Unscored:
    sample_id: str
    reason: str


@dataclass
class ScoringResult:
    breakdowns: list[ScoreBreakdown] = field(default_factory=list)
    unscored: list[Unscored] = field(default_factory=list)
    embed_seconds: float = 0.0
    score_seconds: float = 0.0


@dataclass
class _Prepared:
    """Texts a sample contributes to each embedding channel, plus its diffs."""

    sample_id: str
    old_comment: str
    new_comment: str
    old_code: str
    new_code: str
    dc: list[str]
    ds: list[str]
    dc_text: str
    ds_text: str


def _prepare(sample: Sample) -> _Prepared:
    dc = word_diff(tokenize(sample.old_comment, COMMENT), tokenize(sample.new_comment, COMMENT)).combined
    ds = word_diff(tokenize(sample.old_code, CODE), tokenize(sample.new_code, CODE)).combined
    return _Prepared(
        sample_id=sample.id,
        old_comment=sample.old_comment,
        new_comment=sample.new_comment,
        old_code=sample.old_code,
        new_code=sample.new_code,
        dc=dc,
        ds=ds,
        dc_text=" ".join(dc),
        ds_text=" ".join(ds),
    )


def _clamp01(x: float) -> float:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


def _breakdown(prep: _Prepared, vec: Callable[[str, str], np.ndarray], clamp: bool) -> ScoreBreakdown:
    c_token = cosine(vec(CODE_TOKEN, prep.old_comment), vec(CODE_TOKEN, prep.new_comment))
    c_sent = cosine(vec(SENTENCE, prep.old_comment), vec(SENTENCE, prep.new_comment))
    s_token = cosine(vec(CODE_TOKEN, prep.old_code), vec(CODE_TOKEN, prep.new_code))
    d = cosine(vec(CODE_TOKEN, prep.dc_text), vec(CODE_TOKEN, prep.ds_text))
    if clamp:
        c_token = _clamp01(c_token)
        c_sent = _clamp01(c_sent)
        s_token = _clamp01(s_token)
        d = _clamp01(d)
    o = overlap_score(prep.dc, prep.ds)
    s1 = c_token * c_sent * s_token
    m = max(c_token, s_token)
    s2 = d * m
    s3 = o * m
    final = max(s1, s2, s3)
    return ScoreBreakdown(
        sample_id=prep.sample_id,
        c_token=c_token,
        c_sent=c_sent,
        s_token=s_token,
        s1=s1,
        d=d,
        s2=s2,
        o=o,
        s3=s3,
        final=final,
    )


def score_sample(
    sample: Sample,
    provider,
    cache: EmbeddingCache | None = None,
    clamp: bool = True,
) -> ScoreBreakdown:
    """Score a single sample; embedding failures propagate to the caller."""
    prep = _prepare(sample)

    def vec(channel: str, text: str) -> np.ndarray:
        return cached_embed(text, channel, provider, cache)

    return _breakdown(prep, vec, clamp)


def score_dataset(
    samples: Sequence[Sample],
    provider,
    cache: EmbeddingCache | None = None,
    workers: int = 1,
    clamp: bool = True,
    batch_size: int = DEFAULT_BATCH_SIZE,
    clock: Callable[[], float] = time.perf_counter,
) -> ScoringResult:
    """Score samples in order, batching unique texts through the provider.

    Output order equals input order regardless of worker count, and results
    are bitwise identical across worker counts. Samples whose texts fail to
    embed are reported in ``unscored`` and excluded from ``breakdowns``;
    systemic provider failures propagate and abort the run.

    ``embed_seconds`` measures provider/cache time only; ``score_seconds``
    measures diff preparation and score combination.
    """
    t0 = clock()
    preps = [_prepare(s) for s in samples]

    code_texts: list[str] = []
    sent_texts: list[str] = []
    for p in preps:
        code_texts.extend((p.old_comment, p.new_comment, p.old_code, p.new_code, p.dc_text, p.ds_text))
        sent_texts.extend((p.old_comment, p.new_comment))

    t1 = clock()
    code_vecs, code_bad = embed_unique(code_texts, CODE_TOKEN, provider, cache, batch_size)
    sent_vecs, sent_bad = embed_unique(sent_texts, SENTENCE, provider, cache, batch_size)
    t2 = clock()

    tables = {CODE_TOKEN: (code_vecs, code_bad), SENTENCE: (sent_vecs, sent_bad)}

    def vec(channel: str, text: str) -> np.ndarray:
        vecs, bad = tables[channel]
        got = vecs.get(text)
        if got is None:
            raise EmbedError(bad.get(text, "embedding unavailable"))
        return got

    def score_one(prep: _Prepared) -> ScoreBreakdown | Unscored:
        try:
            return _breakdown(prep, vec, clamp)
        except EmbedError as exc:
            return Unscored(sample_id=prep.sample_id, reason=str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(score_one, preps))
    else:
        results = [score_one(p) for p in preps]
    t3 = clock()

    out = ScoringResult(embed_seconds=t2 - t1, score_seconds=(t1 - t0) + (t3 - t2))
    for r in results:
        if isinstance(r, Unscored):
            out.unscored.append(r)
        else:
            out.breakdowns.append(r)
    return out


def format_score(value: float) -> str:
    return f"{value:.9g}"


def write_scores_csv(breakdowns: Sequence[ScoreBreakdown], path: str | Path) -> None:
    """Export breakdowns with 9 significant digits, rows in input order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for b in breakdowns:
            writer.writerow(
                [b.sample_id] + [format_score(getattr(b, name)) for name in SCORE_FIELDS]
            )
