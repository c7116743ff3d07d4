"""Word-level tokenization, LCS-based diffs, and character-overlap scoring.

Comments and code are reduced to flat word-token sequences. The diff between
an old and a new sequence is the set of tokens left out of a maximum-length
common subsequence alignment; the overlap score compares the changed comment
words against the changed code words through character-level LCS ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

COMMENT = "comment"
CODE = "code"


def tokenize(text: str, kind: str = COMMENT) -> list[str]:
    """Split raw text into word tokens.

    Splits on whitespace, then emits every character that is not alphanumeric
    or an underscore as a standalone token, so ``"if (x>0)"`` becomes
    ``["if", "(", "x", ">", "0", ")"]``. No case folding, no sub-token
    splitting. The same rule applies to comments and code; ``kind`` is kept
    for call-site clarity only. Concatenating the tokens of one whitespace
    chunk reproduces that chunk exactly.
    """
    tokens: list[str] = []
    for chunk in text.split():
        word: list[str] = []
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


@dataclass
class DiffResult:
    """Tokens outside the LCS alignment of an old/new token sequence pair.

    ``changed_old`` holds unmatched tokens from the old sequence in original
    order, ``changed_new`` the same for the new sequence. ``combined`` is the
    canonical flat diff: deleted tokens followed by inserted tokens.
    """

    changed_old: list[str] = field(default_factory=list)
    changed_new: list[str] = field(default_factory=list)

    @property
    def combined(self) -> list[str]:
        return self.changed_old + self.changed_new

    def is_empty(self) -> bool:
        return not self.changed_old and not self.changed_new


def word_diff(old: list[str], new: list[str]) -> DiffResult:
    """Diff two token sequences via a maximum-length common subsequence.

    Among equal-length alignments the one produced by standard DP
    backtracking from the end (prefer match, then a step in the old
    sequence, then a step in the new one) is used, so output is
    deterministic across runs and platforms.
    """
    m, n = len(old), len(new)
    # Common suffix is consumed by the backtracking as forced matches;
    # trimming it first is equivalent and keeps the DP table small.
    suffix = 0
    while suffix < m and suffix < n and old[m - 1 - suffix] == new[n - 1 - suffix]:
        suffix += 1
    a = old[: m - suffix]
    b = new[: n - suffix]
    la, lb = len(a), len(b)

    if la == 0 or lb == 0:
        return DiffResult(changed_old=list(a), changed_new=list(b))

    dp = [[0] * (lb + 1) for _ in range(la + 1)]
    for i in range(1, la + 1):
        row = dp[i]
        prev = dp[i - 1]
        ai = a[i - 1]
        for j in range(1, lb + 1):
            if ai == b[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                up = prev[j]
                left = row[j - 1]
                row[j] = up if up >= left else left

    changed_old: list[str] = []
    changed_new: list[str] = []
    i, j = la, lb
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1]:
            i -= 1
            j -= 1
        elif dp[i - 1][j] >= dp[i][j - 1]:
            changed_old.append(a[i - 1])
            i -= 1
        else:
            changed_new.append(b[j - 1])
            j -= 1
    while i > 0:
        changed_old.append(a[i - 1])
        i -= 1
    while j > 0:
        changed_new.append(b[j - 1])
        j -= 1
    changed_old.reverse()
    changed_new.reverse()
    return DiffResult(changed_old=changed_old, changed_new=changed_new)


def lcs_len(a: str, b: str) -> int:
    """Length of the longest common character subsequence of two strings."""
    if not a or not b:
        return 0
    if len(b) < len(a):
        a, b = b, a
    prev = [0] * (len(a) + 1)
    for ch in b:
        curr = [0]
        best = 0
        for i, ca in enumerate(a, start=1):
            if ch == ca:
                val = prev[i - 1] + 1
            else:
                val = prev[i] if prev[i] >= best else best
            curr.append(val)
            best = val
        prev = curr
    return prev[-1]


def overlap_score(dc: list[str], ds: list[str]) -> float:
    """Mean best character-LCS ratio of changed comment words vs changed code.

    For each word ``w`` in the comment diff the score is
    ``max(lcs_len(w, v) for v in ds) / len(w)``; the result is the mean over
    all comment-diff words. An empty comment diff scores 0 by convention, and
    an empty code diff makes every per-word maximum 0.
    """
    if not dc:
        return 0.0
    if not ds:
        return 0.0
    targets = list(dict.fromkeys(ds))
    memo: dict[str, float] = {}
    ratios = []
    for w in dc:
        got = memo.get(w)
        if got is None:
            got = max(lcs_len(w, v) for v in targets) / len(w)
            memo[w] = got
        ratios.append(got)
    return math.fsum(ratios) / len(ratios)
