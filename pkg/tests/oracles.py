"""Independent brute-force / direct-DP oracles used by the test suite.

These deliberately avoid the production implementations: the LCS oracle
enumerates subsequences, the sequence oracle is a plain full-matrix DP, and
the overlap oracle restates the per-word ratio definition directly.
"""

from __future__ import annotations


def subsequence_lcs_len(a: str, b: str) -> int:
    """Longest common subsequence length by enumerating subsequences of ``a``.

    Exponential in ``len(a)``; intended for strings of length <= 12.
    """
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return 0

    def is_subsequence(s: str, t: str) -> bool:
        it = iter(t)
        return all(ch in it for ch in s)

    subseqs: set[str] = set()
    for mask in range(1 << len(a)):
        subseqs.add("".join(a[i] for i in range(len(a)) if mask & (1 << i)))
    for s in sorted(subseqs, key=len, reverse=True):
        if is_subsequence(s, b):
            return len(s)
    return 0


def dp_lcs_len(a, b) -> int:
    """Plain full-matrix LCS DP over arbitrary sequences."""
    m, n = len(a), len(b)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[m][n]


def direct_overlap(dc: list[str], ds: list[str]) -> float:
    """Per-word best LCS ratio, averaged; direct restatement of the rule."""
    if not dc:
        return 0.0
    total = 0.0
    for w in dc:
        best = 0.0
        for v in ds:
            ratio = dp_lcs_len(w, v) / len(w)
            if ratio > best:
                best = ratio
        total += best
    return total / len(dc)
