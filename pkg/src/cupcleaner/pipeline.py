"""End-to-end cleaning: score, search the anchor on non-test data, split files.

The anchor is searched on the union of the train and valid scores only; the
test set never influences it. Train and valid are partitioned into
``*.cleaned.jsonl`` / ``*.noisy.jsonl``; when test splitting is enabled the
test set is partitioned by the same anchor into additional files while the
input test file itself is never rewritten. Unscored samples go to the noisy
output with the reason recorded in their ``meta``.

All outputs are deterministic: same inputs, config, and provider give byte
identical files. Wall-clock timing is injected (``clock``) so reference runs
can pin it to zero.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

from .anchor import (
    AnchorConfig,
    distribution_stats,
    filter_by_anchor,
    search_anchor,
    write_histogram_csv,
)
from .corpus import Dataset, Sample, write_dataset, write_rejects
from .embedding import DEFAULT_BATCH_SIZE, EmbeddingCache, HashEmbedder, ServiceEmbedder
from .errors import InputError
from .scoring import ScoringResult, score_dataset, write_scores_csv

SCORES_CSV = "scores.csv"
HISTOGRAM_CSV = "histogram.csv"
REPORT_JSON = "report.json"
REJECTS_JSONL = "rejects.jsonl"


@dataclass
class CleanConfig:
    """Everything that affects cleaning output, echoed into the report."""

    embedder: str = "hash"  # "hash" | "service"
    service_url: str | None = None
    cap: float = 0.8
    clamp: bool = True
    split_test: bool = False
    workers: int = 1
    batch_size: int = DEFAULT_BATCH_SIZE
    cache_dir: str | None = None
    lambda0: float = 2.0
    record_all: bool = False

    def anchor_config(self) -> AnchorConfig:
        return AnchorConfig(lambda0=self.lambda0, cap=self.cap, record_all=self.record_all)


def make_provider(config: CleanConfig):
    if config.embedder == "hash":
        return HashEmbedder()
    if config.embedder == "service":
        if not config.service_url:
            raise InputError("--service-url (or CUPCLEANER_SERVICE_URL) required for the service embedder")
        return ServiceEmbedder(config.service_url, batch_size=config.batch_size)
    raise InputError(f"unknown embedder {config.embedder!r}")


def make_cache(config: CleanConfig) -> EmbeddingCache | None:
    return EmbeddingCache(config.cache_dir) if config.cache_dir else None


def _split_report(n_input: int, kept: int, removed: int, unscored: int) -> dict:
    return {"input": n_input, "kept": kept, "removed": removed, "unscored": unscored}


def _partition(
    samples: list[Sample],
    scoring: ScoringResult,
    anchor: float | None,
) -> tuple[list[Sample], list[Sample], dict[str, str]]:
    """Split samples into (kept, noisy) in input order.

    Noisy = scored strictly below the anchor plus unscored samples; with no
    anchor selected nothing is filtered and only unscored samples are noisy.
    """
    reasons = {u.sample_id: u.reason for u in scoring.unscored}
    scored_samples = [s for s in samples if s.id not in reasons]
    if anchor is None:
        removed_ids: set[str] = set()
    else:
        _, removed = filter_by_anchor(scored_samples, scoring.breakdowns, anchor)
        removed_ids = {s.id for s in removed}
    kept: list[Sample] = []
    noisy: list[Sample] = []
    for sample in samples:
        if sample.id in reasons or sample.id in removed_ids:
            noisy.append(sample)
        else:
            kept.append(sample)
    return kept, noisy, reasons


def _with_reason(sample: Sample, reason: str) -> Sample:
    meta = dict(sample.meta)
    meta["unscored_reason"] = reason
    return Sample(
        id=sample.id,
        old_code=sample.old_code,
        new_code=sample.new_code,
        old_comment=sample.old_comment,
        new_comment=sample.new_comment,
        split=sample.split,
        meta=meta,
    )


def _write_split_files(
    out_dir: Path,
    name: str,
    kept: list[Sample],
    noisy: list[Sample],
    reasons: dict[str, str],
) -> None:
    noisy_out = [
        _with_reason(s, reasons[s.id]) if s.id in reasons else s for s in noisy
    ]
    write_dataset(kept, out_dir / f"{name}.cleaned.jsonl")
    write_dataset(noisy_out, out_dir / f"{name}.noisy.jsonl")


def _rejects_entries(named: list[tuple[str, Dataset]]) -> list[dict]:
    entries = []
    for name, ds in named:
        for r in ds.rejects:
            entries.append({"split": name, "line_no": r.line_no, "reason": r.reason})
    return entries


def clean(
    train: Dataset,
    valid: Dataset,
    test: Dataset | None = None,
    *,
    config: CleanConfig | None = None,
    out_dir: str | Path,
    provider=None,
    cache: EmbeddingCache | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> dict:
    """Run the full cleaning pipeline and write all outputs under ``out_dir``.

    Returns the report that was written to ``report.json``.
    """
    config = config or CleanConfig()
    if not train.samples:
        raise InputError("train split is empty")
    if provider is None:
        provider = make_provider(config)
    if cache is None:
        cache = make_cache(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    t_start = clock()

    # Ids are unique per dataset, not across datasets, so each split is
    # scored on its own; per-sample scores do not depend on dataset order.
    def run_scoring(samples):
        return score_dataset(
            samples,
            provider,
            cache=cache,
            workers=config.workers,
            clamp=config.clamp,
            batch_size=config.batch_size,
            clock=clock,
        )

    train_scoring = run_scoring(train.samples)
    valid_scoring = run_scoring(valid.samples)
    nontest_finals = [b.final for b in train_scoring.breakdowns] + [
        b.final for b in valid_scoring.breakdowns
    ]
    if not nontest_finals:
        raise InputError("no scorable samples in train+valid; cannot search an anchor")

    embed_seconds = train_scoring.embed_seconds + valid_scoring.embed_seconds
    score_seconds = train_scoring.score_seconds + valid_scoring.score_seconds

    t_a0 = clock()
    anchor_result = search_anchor(nontest_finals, config.anchor_config())
    anchor_seconds = clock() - t_a0

    # All scoring happens before the first write so a systemic provider
    # failure aborts with no partial cleaned outputs.
    test_scoring = None
    if test is not None and config.split_test:
        test_scoring = run_scoring(test.samples)
        embed_seconds += test_scoring.embed_seconds
        score_seconds += test_scoring.score_seconds

    selected = anchor_result.selected
    train_kept, train_noisy, train_reasons = _partition(train.samples, train_scoring, selected)
    valid_kept, valid_noisy, valid_reasons = _partition(valid.samples, valid_scoring, selected)

    _write_split_files(out_dir, "train", train_kept, train_noisy, train_reasons)
    _write_split_files(out_dir, "valid", valid_kept, valid_noisy, valid_reasons)

    n_train = len(train.samples)
    splits = {
        "train": _split_report(
            n_train, len(train_kept), n_train - len(train_kept) - len(train_scoring.unscored),
            len(train_scoring.unscored),
        ),
        "valid": _split_report(
            len(valid.samples), len(valid_kept),
            len(valid.samples) - len(valid_kept) - len(valid_scoring.unscored),
            len(valid_scoring.unscored),
        ),
        "test": None,
    }

    all_breakdowns = train_scoring.breakdowns + valid_scoring.breakdowns
    unscored_total = len(train_scoring.unscored) + len(valid_scoring.unscored)

    if test_scoring is not None:
        test_kept, test_noisy, test_reasons = _partition(test.samples, test_scoring, selected)
        _write_split_files(out_dir, "test", test_kept, test_noisy, test_reasons)
        splits["test"] = _split_report(
            len(test.samples), len(test_kept),
            len(test.samples) - len(test_kept) - len(test_scoring.unscored),
            len(test_scoring.unscored),
        )
        all_breakdowns.extend(test_scoring.breakdowns)
        unscored_total += len(test_scoring.unscored)

    write_scores_csv(all_breakdowns, out_dir / SCORES_CSV)
    write_histogram_csv(anchor_result.stats.histogram, out_dir / HISTOGRAM_CSV)

    named = [("train", train), ("valid", valid)]
    if test is not None:
        named.append(("test", test))
    write_rejects(_rejects_entries(named), out_dir / REJECTS_JSONL)

    total_seconds = clock() - t_start
    report = {
        "provider_id": provider.provider_id,
        "splits": splits,
        "anchor": anchor_result.to_dict(),
        "unscored_total": unscored_total,
        "timing": {
            "embed_seconds": embed_seconds,
            "score_seconds": score_seconds,
            "anchor_seconds": anchor_seconds,
            "total_seconds": total_seconds,
        },
        "config": asdict(config),
    }
    _write_report(report, out_dir / REPORT_JSON)
    return report


def _write_report(report: dict, path: Path) -> None:
    path.write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def score_only(
    dataset: Dataset,
    *,
    config: CleanConfig | None = None,
    out_dir: str | Path,
    provider=None,
    cache: EmbeddingCache | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> dict:
    """Score a dataset and export ``scores.csv`` + ``histogram.csv`` only."""
    config = config or CleanConfig()
    if provider is None:
        provider = make_provider(config)
    if cache is None:
        cache = make_cache(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    scoring = score_dataset(
        dataset.samples,
        provider,
        cache=cache,
        workers=config.workers,
        clamp=config.clamp,
        batch_size=config.batch_size,
        clock=clock,
    )
    write_scores_csv(scoring.breakdowns, out_dir / SCORES_CSV)
    if scoring.breakdowns:
        stats = distribution_stats([b.final for b in scoring.breakdowns])
        histogram = stats.histogram
    else:
        histogram = [0] * 100
    write_histogram_csv(histogram, out_dir / HISTOGRAM_CSV)
    write_rejects(_rejects_entries([("input", dataset)]), out_dir / REJECTS_JSONL)
    return {
        "provider_id": provider.provider_id,
        "scored": len(scoring.breakdowns),
        "unscored": len(scoring.unscored),
        "timing": {
            "embed_seconds": scoring.embed_seconds,
            "score_seconds": scoring.score_seconds,
        },
    }


def subsample(dataset: Dataset, rate: float, seed: int) -> list[Sample]:
    """Uniform per-split random subsample (kept out of the cleaning path).

    Draws ``round(rate * n)`` samples from each split with an explicit seed;
    output preserves input order.
    """
    if not 0.0 <= rate <= 1.0:
        raise InputError(f"rate must be in [0, 1], got {rate}")
    rng = random.Random(seed)
    by_split: dict[str, list[int]] = {}
    for idx, sample in enumerate(dataset.samples):
        by_split.setdefault(sample.split, []).append(idx)
    chosen: set[int] = set()
    for split in sorted(by_split):
        indices = by_split[split]
        k = round(rate * len(indices))
        chosen.update(rng.sample(indices, k))
    return [s for i, s in enumerate(dataset.samples) if i in chosen]


def report_render(report: dict) -> str:
    """Human-readable summary: split counts, anchor line, timing block."""
    lines = []
    lines.append(f"{'split':<8}{'input':>8}{'kept':>8}{'removed':>9}{'unscored':>10}")
    for name in ("train", "valid", "test"):
        info = report["splits"].get(name)
        if info is None:
            if name == "test":
                lines.append(f"{'test':<8}{'(untouched)':>8}")
            continue
        lines.append(
            f"{name:<8}{info['input']:>8}{info['kept']:>8}{info['removed']:>9}{info['unscored']:>10}"
        )

    a = report["anchor"]
    if a["selected"] is None:
        lines.append("anchor: no filtering applied (degenerate distribution)")
    else:
        threshold = next(
            (c["threshold"] for c in a["candidates"] if c["anchor"] == a["selected"]),
            None,
        )
        tpart = f"threshold {threshold:g}, " if threshold is not None else ""
        lines.append(
            f"anchor: {tpart}anchor {a['selected']:.4f}, "
            f"rule {a['selection_rule']}, delete rate {a['delete_rate'] * 100:.1f}%"
        )
    if report.get("unscored_total"):
        lines.append(f"unscored samples: {report['unscored_total']}")

    t = report.get("timing", {})
    if t:
        lines.append(f"compute semantics:              {t.get('embed_seconds', 0.0):.2f} s")
        lines.append(
            "compute scores & search anchor: "
            f"{t.get('score_seconds', 0.0) + t.get('anchor_seconds', 0.0):.2f} s"
        )
        lines.append(f"total:                          {t.get('total_seconds', 0.0):.2f} s")
    return "\n".join(lines)
