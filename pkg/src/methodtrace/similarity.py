"""Case-sensitive string similarity scoring used by all matching stages.

Jaro and Jaro-Winkler over raw strings, plus a method-level comparison that
works on whitespace-normalized method text (comments stripped, string
literals preserved byte-exactly). Comparison is case-sensitive throughout:
a quoted literal that changes letter case must lower the score.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .javasource import MethodRecord

# Classical Winkler defaults: prefix scaling 0.1, prefix length capped at 4.
_PREFIX_WEIGHT = 0.1
_MAX_PREFIX = 4


def jaro(a: str, b: str) -> float:
    """Jaro similarity in [0, 1].

    Matching characters are paired greedily left to right within the usual
    window of ``max(len(a), len(b)) // 2 - 1``. Runs in O(len(a) + len(b))
    by keeping a queue of unmatched positions per character; the pairing is
    identical to the textbook nested-loop scan.
    """
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(len(a), len(b)) // 2 - 1

    positions: dict[str, deque[int]] = {}
    for j, ch in enumerate(b):
        positions.setdefault(ch, deque()).append(j)

    a_matched: list[int] = []
    b_matched: list[int] = []
    for i, ch in enumerate(a):
        queue = positions.get(ch)
        if not queue:
            continue
        while queue and queue[0] < i - window:
            queue.popleft()
        if queue and queue[0] <= i + window:
            b_matched.append(queue.popleft())
            a_matched.append(i)

    m = len(a_matched)
    if m == 0:
        return 0.0
    b_matched.sort()
    half_transposed = sum(1 for i, j in zip(a_matched, b_matched) if a[i] != b[j])
    t = half_transposed / 2.0
    return (m / len(a) + m / len(b) + (m - t) / m) / 3.0


def jaro_winkler(a: str, b: str) -> float:
    """Jaro-Winkler similarity: Jaro boosted by shared prefix length."""
    j = jaro(a, b)
    prefix = 0
    for x, y in zip(a[:_MAX_PREFIX], b[:_MAX_PREFIX]):
        if x != y:
            break
        prefix += 1
    return j + prefix * _PREFIX_WEIGHT * (1.0 - j)


@lru_cache(maxsize=8192)
def _normalized_method_text(full_text: str) -> str:
    from .javasource import normalize_java_text

    return normalize_java_text(full_text)


def method_similarity(x: "MethodRecord", y: "MethodRecord") -> float:
    """Jaro-Winkler over the two methods' normalized full text.

    Normalization strips comments (the Javadoc block included) and collapses
    whitespace outside string/char literals, so indentation and comment churn
    never mask body identity.
    """
    return jaro_winkler(
        _normalized_method_text(x.full_text),
        _normalized_method_text(y.full_text),
    )
