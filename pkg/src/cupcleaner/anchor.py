"""Score-distribution statistics and the anchor search that trims its tail.

The search starts a cut point at ``mu - lambda0*delta`` and sweeps it right
in steps of 0.01 standard deviations. For each area-change threshold ``t``
(0.01 .. 0.10), the first sweep offset whose cumulative-area change exceeds
``t`` yields a candidate anchor at the moved point ``mu - (lambda0 - x) *
delta``. Selection is aggressive: the largest candidate anchor wins, subject
to a cap (default 0.8) above which the distribution is clearly not tail -
then the search falls back to the largest candidate below the cap, then to
the baseline point, then to no filtering at all.

"Lower than" is strict everywhere: a score exactly at the cut is kept.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Sample
from .errors import InputError
from .scoring import ScoreBreakdown

HISTOGRAM_BINS = 100

AGGRESSIVE = "aggressive"
CAP_FALLBACK = "cap_fallback"
BASELINE_FALLBACK = "baseline_fallback"
DEGENERATE_NONE = "degenerate_none"

_EDGES = [k / HISTOGRAM_BINS for k in range(HISTOGRAM_BINS + 1)]


@dataclass
class DistributionStats:
    mu: float
    delta: float
    n: int
    histogram: list[int]


@dataclass
class AnchorCandidate:
    threshold: float
    x: float
    anchor: float
    area_change: float


@dataclass
class AnchorConfig:
    lambda0: float = 2.0
    threshold_count: int = 10  # thresholds i/100 for i in 1..threshold_count
    x_count: int = 201  # sweep offsets i/100 for i in 1..x_count
    cap: float = 0.8
    record_all: bool = False  # record every crossing, not just the first per threshold

    def thresholds(self) -> list[float]:
        return [i / 100 for i in range(1, self.threshold_count + 1)]

    def offsets(self) -> list[float]:
        return [i / 100 for i in range(1, self.x_count + 1)]


@dataclass
class AnchorResult:
    stats: DistributionStats
    candidates: list[AnchorCandidate] = field(default_factory=list)
    selected: float | None = None
    selection_rule: str = DEGENERATE_NONE
    delete_rate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "mu": self.stats.mu,
            "delta": self.stats.delta,
            "n": self.stats.n,
            "candidates": [
                {
                    "threshold": c.threshold,
                    "x": c.x,
                    "anchor": c.anchor,
                    "area_change": c.area_change,
                }
                for c in self.candidates
            ],
            "selected": self.selected,
            "selection_rule": self.selection_rule,
            "delete_rate": self.delete_rate,
        }


def distribution_stats(scores: Sequence[float]) -> DistributionStats:
    """Population mean/standard deviation plus a 100-bin histogram over [0, 1].

    Bins are right-open with width 0.01 except the last one, which includes
    1.0. The mean uses exactly-rounded summation (``math.fsum``) so results
    do not depend on accumulation order.
    """
    n = len(scores)
    if n == 0:
        raise InputError("distribution_stats requires at least one score")
    mu = math.fsum(scores) / n
    delta = math.sqrt(math.fsum((s - mu) ** 2 for s in scores) / n)
    histogram = [0] * HISTOGRAM_BINS
    for s in scores:
        idx = bisect_right(_EDGES, s) - 1
        if idx >= HISTOGRAM_BINS:  # s == 1.0 belongs to the last bin
            idx = HISTOGRAM_BINS - 1
        elif idx < 0:
            idx = 0
        histogram[idx] += 1
    return DistributionStats(mu=mu, delta=delta, n=n, histogram=histogram)


def area_changed(
    stats: DistributionStats, scores: Sequence[float], lam: float, x: float
) -> tuple[float, float, float]:
    """Area gained by moving the cut from ``mu - lam*delta`` right by ``x`` sigmas.

    Returns ``(r_c, p_old, p_new)`` where ``r_c`` is the fraction of scores
    strictly below the moved cut minus the fraction strictly below the
    original cut.
    """
    n = len(scores)
    p_old = stats.mu - lam * stats.delta
    p_new = stats.mu - (lam - x) * stats.delta
    r_o = sum(1 for s in scores if s < p_old) / n
    r_n = sum(1 for s in scores if s < p_new) / n
    return r_n - r_o, p_old, p_new


def search_anchor(scores: Sequence[float], config: AnchorConfig | None = None) -> AnchorResult:
    """Sweep the cut point and pick the filtering anchor.

    Per threshold (ascending) the sweep stops at the first offset whose area
    change strictly exceeds the threshold; that moved point is the
    threshold's candidate anchor (``record_all`` keeps every crossing
    instead). See the module docstring for the selection chain.
    """
    if not scores:
        raise InputError("search_anchor requires at least one score")
    config = config or AnchorConfig()
    stats = distribution_stats(scores)
    ordered = sorted(scores)
    n = stats.n

    def frac_below(cut: float) -> float:
        return bisect_left(ordered, cut) / n

    r_base = frac_below(stats.mu - config.lambda0 * stats.delta)

    candidates: list[AnchorCandidate] = []
    for t in config.thresholds():
        for x in config.offsets():
            p_new = stats.mu - (config.lambda0 - x) * stats.delta
            r_c = frac_below(p_new) - r_base
            if r_c > t:
                candidates.append(AnchorCandidate(threshold=t, x=x, anchor=p_new, area_change=r_c))
                if not config.record_all:
                    break

    result = AnchorResult(stats=stats, candidates=candidates)
    if candidates:
        best = None
        over_cap = False
        for c in candidates:
            if c.anchor <= config.cap:
                if best is None or c.anchor >= best.anchor:
                    best = c
            else:
                over_cap = True
        if best is not None:
            result.selected = best.anchor
            result.selection_rule = CAP_FALLBACK if over_cap else AGGRESSIVE

    if result.selected is None:
        baseline = stats.mu - config.lambda0 * stats.delta
        if frac_below(baseline) > 0.0:
            result.selected = baseline
            result.selection_rule = BASELINE_FALLBACK
        else:
            result.selection_rule = DEGENERATE_NONE

    if result.selected is not None:
        result.delete_rate = frac_below(result.selected)
    return result


def filter_by_anchor(
    samples: Sequence[Sample],
    breakdowns: Sequence[ScoreBreakdown],
    anchor: float,
) -> tuple[list[Sample], list[Sample]]:
    """Partition samples into (kept, removed) by the strict-less rule.

    ``breakdowns`` must cover ``samples`` one to one, in order; a sample
    whose final score equals the anchor exactly is kept.
    """
    if len(samples) != len(breakdowns):
        raise InputError(
            f"breakdowns ({len(breakdowns)}) do not cover samples ({len(samples)})"
        )
    kept: list[Sample] = []
    removed: list[Sample] = []
    for sample, b in zip(samples, breakdowns):
        if b.sample_id != sample.id:
            raise InputError(f"breakdown id {b.sample_id!r} does not match sample {sample.id!r}")
        if b.final < anchor:
            removed.append(sample)
        else:
            kept.append(sample)
    return kept, removed


def write_histogram_csv(histogram: Sequence[int], path) -> None:
    """Export ``bin_start,count`` rows for the 100 score bins."""
    from pathlib import Path

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_start,count\n")
        for k, count in enumerate(histogram):
            fh.write(f"{k / HISTOGRAM_BINS:.2f},{count}\n")
