#!/usr/bin/env python3
"""Straight-line reference run that produces the golden end-to-end outputs.

Everything is restated here from the definitions - tokenizer, word-level LCS
diff, character LCS, overlap, hash embedding, the score chain, the
distribution statistics, the anchor sweep, and every output file format -
without importing the cupcleaner package. The pipeline must reproduce these
files byte for byte; any divergence between the two code paths fails the
golden test.

Usage: python scripts/golden_oracle.py [corpus_dir] [out_dir]
"""

import csv
import hashlib
import json
import math
import sys
from bisect import bisect_left, bisect_right
from pathlib import Path

import numpy as np

DIM = 256
PROVIDER = "hash-ngram-v1"
CAP = 0.8
LAMBDA0 = 2.0

# ---------------------------------------------------------------- text layer


def tokenize(text):
    tokens = []
    for chunk in text.split():
        word = []
        for ch in chunk:
            if ch.isalnum() or ch == "_":
                word.append(ch)
            else:
                if word:
                    tokens.append("".join(word))
                    word = []
                tokens.append(ch)
        if word:
            tokens.append("".join(word))
    return tokens


def diff_combined(old, new):
    """Changed-old then changed-new tokens from a full-matrix LCS backtrack
    (prefer match, then old-step, then new-step)."""
    m, n = len(old), len(new)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if old[i - 1] == new[j - 1]:
                dp[i][j] = dp[i - 1][j - 1] + 1
            else:
                dp[i][j] = max(dp[i - 1][j], dp[i][j - 1])
    changed_old, changed_new = [], []
    i, j = m, n
    while i > 0 and j > 0:
        if old[i - 1] == new[j - 1]:
            i -= 1
            j -= 1
        elif dp[i - 1][j] >= dp[i][j - 1]:
            changed_old.append(old[i - 1])
            i -= 1
        else:
            changed_new.append(new[j - 1])
            j -= 1
    changed_old.extend(reversed(old[:i]))
    changed_new.extend(reversed(new[:j]))
    changed_old.reverse()
    changed_new.reverse()
    return changed_old + changed_new


def lcs_chars(a, b):
    dp = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                dp[i][j] = dp[i - 1][j - 1] + 1
            else:
                dp[i][j] = max(dp[i - 1][j], dp[i][j - 1])
    return dp[-1][-1]


def overlap(dc, ds):
    if not dc or not ds:
        return 0.0
    ratios = []
    for w in dc:
        best = 0.0
        for v in ds:
            r = lcs_chars(w, v) / len(w)
            if r > best:
                best = r
        ratios.append(best)
    return math.fsum(ratios) / len(ratios)


# ----------------------------------------------------------- embedding layer


def hash_embed(text, channel):
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
    return vec.astype(np.float32)


def cos(a, b):
    a64 = a.astype(np.float64)
    b64 = b.astype(np.float64)
    na = float(np.linalg.norm(a64))
    nb = float(np.linalg.norm(b64))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return max(-1.0, min(1.0, float(np.dot(a64, b64) / (na * nb))))


def clamp01(x):
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def score(sample, memo):
    def emb(channel, text):
        k = (channel, text)
        if k not in memo:
            memo[k] = hash_embed(text, channel)
        return memo[k]

    dc = diff_combined(tokenize(sample["old_comment"]), tokenize(sample["new_comment"]))
    ds = diff_combined(tokenize(sample["old_code"]), tokenize(sample["new_code"]))
    c_token = clamp01(cos(emb("code_token", sample["old_comment"]), emb("code_token", sample["new_comment"])))
    c_sent = clamp01(cos(emb("sentence", sample["old_comment"]), emb("sentence", sample["new_comment"])))
    s_token = clamp01(cos(emb("code_token", sample["old_code"]), emb("code_token", sample["new_code"])))
    d = clamp01(cos(emb("code_token", " ".join(dc)), emb("code_token", " ".join(ds))))
    o = overlap(dc, ds)
    s1 = c_token * c_sent * s_token
    m = max(c_token, s_token)
    s2 = d * m
    s3 = o * m
    final = max(s1, s2, s3)
    return {
        "id": sample["id"], "c_token": c_token, "c_sent": c_sent, "s_token": s_token,
        "s1": s1, "d": d, "s2": s2, "o": o, "s3": s3, "final": final,
    }


# -------------------------------------------------------------- anchor layer


def stats_of(scores):
    n = len(scores)
    mu = math.fsum(scores) / n
    delta = math.sqrt(math.fsum((s - mu) ** 2 for s in scores) / n)
    edges = [k / 100 for k in range(101)]
    hist = [0] * 100
    for s in scores:
        idx = bisect_right(edges, s) - 1
        if idx >= 100:
            idx = 99
        elif idx < 0:
            idx = 0
        hist[idx] += 1
    return mu, delta, n, hist


def anchor_search(scores):
    mu, delta, n, hist = stats_of(scores)
    ordered = sorted(scores)

    def frac_below(cut):
        return bisect_left(ordered, cut) / n

    r_base = frac_below(mu - LAMBDA0 * delta)
    candidates = []
    for ti in range(1, 11):
        t = ti / 100
        for xi in range(1, 202):
            x = xi / 100
            p_new = mu - (LAMBDA0 - x) * delta
            r_c = frac_below(p_new) - r_base
            if r_c > t:
                candidates.append({"threshold": t, "x": x, "anchor": p_new, "area_change": r_c})
                break

    selected = None
    rule = "degenerate_none"
    over_cap = False
    for c in candidates:
        if c["anchor"] <= CAP:
            if selected is None or c["anchor"] >= selected:
                selected = c["anchor"]
        else:
            over_cap = True
    if selected is not None:
        rule = "cap_fallback" if over_cap else "aggressive"
    else:
        baseline = mu - LAMBDA0 * delta
        if frac_below(baseline) > 0.0:
            selected = baseline
            rule = "baseline_fallback"
    delete_rate = frac_below(selected) if selected is not None else 0.0
    return {
        "mu": mu, "delta": delta, "n": n,
        "candidates": candidates,
        "selected": selected, "selection_rule": rule, "delete_rate": delete_rate,
    }, hist


# ------------------------------------------------------------------- file IO


def load_jsonl(path):
    rows = []
    for line in path.read_text(encoding="utf-8").split("\n"):
        if line:
            rows.append(json.loads(line))
    return rows


def write_jsonl(rows, path):
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            record = {
                "id": row["id"], "old_code": row["old_code"], "new_code": row["new_code"],
                "old_comment": row["old_comment"], "new_comment": row["new_comment"],
                "split": row["split"], "meta": row.get("meta", {}),
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def main() -> int:
    root = Path(__file__).resolve().parents[1]
    corpus_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else root / "tests" / "data" / "corpus"
    out_dir = Path(sys.argv[2]) if len(sys.argv) > 2 else root / "tests" / "goldens"
    out_dir.mkdir(parents=True, exist_ok=True)

    splits = {name: load_jsonl(corpus_dir / f"{name}.jsonl") for name in ("train", "valid", "test")}
    memo = {}
    scored = {name: [score(row, memo) for row in rows] for name, rows in splits.items()}

    nontest_finals = [b["final"] for b in scored["train"]] + [b["final"] for b in scored["valid"]]
    anchor, hist = anchor_search(nontest_finals)
    cut = anchor["selected"]

    split_reports = {}
    for name in ("train", "valid", "test"):
        rows, breakdowns = splits[name], scored[name]
        kept = [r for r, b in zip(rows, breakdowns) if cut is None or b["final"] >= cut]
        noisy = [r for r, b in zip(rows, breakdowns) if cut is not None and b["final"] < cut]
        write_jsonl(kept, out_dir / f"{name}.cleaned.jsonl")
        write_jsonl(noisy, out_dir / f"{name}.noisy.jsonl")
        split_reports[name] = {
            "input": len(rows), "kept": len(kept), "removed": len(noisy), "unscored": 0,
        }

    with (out_dir / "scores.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "c_token", "c_sent", "s_token", "s1", "d", "s2", "o", "s3", "final"])
        for name in ("train", "valid", "test"):
            for b in scored[name]:
                writer.writerow(
                    [b["id"]] + [f"{b[k]:.9g}" for k in
                                 ("c_token", "c_sent", "s_token", "s1", "d", "s2", "o", "s3", "final")]
                )

    with (out_dir / "histogram.csv").open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_start,count\n")
        for k, count in enumerate(hist):
            fh.write(f"{k / 100:.2f},{count}\n")

    (out_dir / "rejects.jsonl").write_text("", encoding="utf-8")

    report = {
        "provider_id": PROVIDER,
        "splits": split_reports,
        "anchor": anchor,
        "unscored_total": 0,
        "timing": {
            "embed_seconds": 0.0, "score_seconds": 0.0,
            "anchor_seconds": 0.0, "total_seconds": 0.0,
        },
        "config": {
            "embedder": "hash", "service_url": None, "cap": CAP, "clamp": True,
            "split_test": True, "workers": 1, "batch_size": 32, "cache_dir": None,
            "lambda0": LAMBDA0, "record_all": False,
        },
    }
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    print(f"goldens written to {out_dir}")
    print(f"anchor: {anchor['selected']} rule={anchor['selection_rule']} "
          f"delete_rate={anchor['delete_rate']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
