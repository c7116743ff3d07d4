#!/usr/bin/env python3
"""Generate the bundled 100-sample synthetic corpus (60 train / 20 valid / 20 test).

Seeded and deterministic. The mix mirrors the data-quality situations the
cleaner is built for: consistent comment/code updates, updates where only one
side really changes, invalid or gibberish comments, identical pairs, and a
few samples with unicode, newlines, and tabs. The files are checked in under
tests/data/corpus/ and are the input of the golden end-to-end test.

Usage: python scripts/make_synthetic_corpus.py [out_dir]
"""

import json
import random
import sys
from pathlib import Path

SEED = 20240811

NOUNS = ["value", "location", "index", "count", "buffer", "cache", "result",
         "total", "offset", "limit", "handle", "status"]
VERBS = ["returns", "computes", "updates", "clears", "checks", "stores"]
TYPES = ["int", "long", "String", "boolean", "double"]
GIBBERISH = ["@@@@", "???", "aaa bbb ccc", "xXxXx", "!!!", "TODO TODO TODO"]


def camel(noun: str) -> str:
    return noun[0].upper() + noun[1:]


def good_update(rng: random.Random) -> dict:
    """Comment change mirrors the code change."""
    old_n, new_n = rng.sample(NOUNS, 2)
    typ = rng.choice(TYPES)
    verb = rng.choice(VERBS)
    old_code = f"public {typ} get{camel(old_n)}() {{\n    return {old_n};\n}}"
    new_code = f"public {typ} get{camel(new_n)}() {{\n    return {new_n};\n}}"
    return {
        "old_code": old_code,
        "new_code": new_code,
        "old_comment": f"{verb} the {old_n}.",
        "new_comment": f"{verb} the {new_n}.",
    }


def guarded_update(rng: random.Random) -> dict:
    """Code gains a guard clause; the comment mentions it."""
    n = rng.choice(NOUNS)
    bound = rng.randint(1, 99)
    old_code = f"void set{camel(n)}(int v) {{\n    {n} = v;\n}}"
    new_code = (
        f"void set{camel(n)}(int v) {{\n    if (v < {bound}) {{\n        return;\n    }}\n"
        f"    {n} = v;\n}}"
    )
    return {
        "old_code": old_code,
        "new_code": new_code,
        "old_comment": f"sets the {n}.",
        "new_comment": f"sets the {n} if it is at least {bound}.",
    }


def unrelated_comment_change(rng: random.Random) -> dict:
    """Type II noise: code and comment change about different things."""
    old_n, new_n = rng.sample(NOUNS, 2)
    other = rng.choice([x for x in NOUNS if x not in (old_n, new_n)])
    old_code = f"{rng.choice(TYPES)} {old_n} = compute({old_n});"
    new_code = f"{rng.choice(TYPES)} {new_n} = compute({new_n}) + recheck();"
    return {
        "old_code": old_code,
        "new_code": new_code,
        "old_comment": f"forwarded the {other} for the caller.",
        "new_comment": f"nothing to see here, moved {rng.choice(GIBBERISH)}.",
    }


def invalid_comment(rng: random.Random) -> dict:
    """Type I noise: one side of the comment pair is junk."""
    n = rng.choice(NOUNS)
    base = {
        "old_code": f"int {n} = 0;",
        "new_code": f"int {n} = 1;",
        "old_comment": f"initial {n}.",
        "new_comment": rng.choice(GIBBERISH),
    }
    if rng.random() < 0.4:
        base["old_comment"], base["new_comment"] = base["new_comment"], base["old_comment"]
    if rng.random() < 0.3:
        base["new_comment"] = ""
    return base


def identical_pair(rng: random.Random) -> dict:
    n = rng.choice(NOUNS)
    code = f"return {n}.size();"
    comment = f"current number of {n} entries."
    return {"old_code": code, "new_code": code, "old_comment": comment, "new_comment": comment}


def quirky(rng: random.Random) -> dict:
    """Unicode, tabs, and embedded newlines that must survive round-trips."""
    n = rng.choice(NOUNS)
    return {
        "old_code": f"// π≈3.14159\n\tString {n} = \"café\";",
        "new_code": f"// π≈3.14159\n\tString {n} = \"caffè\";\n\tlog({n});",
        "old_comment": f"日本語: {n} を返す。",
        "new_comment": f"日本語: 更新された {n} を返す。",
    }


MAKERS = [
    (good_update, 40),
    (guarded_update, 15),
    (unrelated_comment_change, 20),
    (invalid_comment, 10),
    (identical_pair, 10),
    (quirky, 5),
]


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus"
    )
    rng = random.Random(SEED)

    pool = []
    for maker, weight in MAKERS:
        pool.extend([maker] * weight)
    rng.shuffle(pool)

    records = []
    for maker in pool:
        records.append(maker(rng))

    splits = [("train", records[:60]), ("valid", records[60:80]), ("test", records[80:100])]
    out_dir.mkdir(parents=True, exist_ok=True)
    for split, rows in splits:
        path = out_dir / f"{split}.jsonl"
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for i, row in enumerate(rows, start=1):
                record = {
                    "id": f"{split}-{i:04d}",
                    "old_code": row["old_code"],
                    "new_code": row["new_code"],
                    "old_comment": row["old_comment"],
                    "new_comment": row["new_comment"],
                    "split": split,
                    "meta": {"origin": "synthetic"},
                }
                fh.write(json.dumps(record, ensure_ascii=False))
                fh.write("\n")
        print(f"wrote {len(rows):3d} samples to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
