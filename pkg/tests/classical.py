"""Classical small-cancellation pieces of a single cyclic word, by string matching only.

A placement is a start position and a reading direction on the cyclic
word.  Two placements are equivalent when a label-preserving symmetry of
the relator cycle carries one to the other.  A piece is a subword read at
two inequivalent placements.
"""

from __future__ import annotations

import math


def inverse(word: str) -> str:
    return word[::-1].swapcase()


def read(word: str, start: int, direction: int, length: int) -> str:
    n = len(word)
    if direction > 0:
        return "".join(word[(start + k) % n] for k in range(length))
    return "".join(word[(start - 1 - k) % n].swapcase() for k in range(length))


def symmetries(word: str) -> list[tuple[int, int]]:
    """Maps (shift, flip) of positions preserving the labelled cycle."""
    n = len(word)
    out = []
    for r in range(n):
        if word[r:] + word[:r] == word:
            out.append((r, 1))
    inv = inverse(word)
    for r in range(n):
        # position p read backwards equals position r - p read forwards
        if all(read(word, (r - p) % n, -1, 1) == word[p] for p in range(n)) and inv:
            out.append((r, -1))
    return out


def equivalent(word: str, p1: tuple[int, int], p2: tuple[int, int]) -> bool:
    n = len(word)
    for r, flip in symmetries(word):
        s, d = p1
        if flip > 0:
            img = ((s + r) % n, d)
        else:
            img = ((r - s) % n, -d)
        if img == p2:
            return True
    return False


def piece_lengths(word: str) -> dict[tuple[int, int], int]:
    """For each placement, the longest prefix that is also read at an inequivalent placement."""
    n = len(word)
    places = [(s, d) for s in range(n) for d in (1, -1)]
    best = {}
    for p in places:
        m = 0
        for q in places:
            if q == p or equivalent(word, p, q):
                continue
            k = 0
            while k < n and read(word, *p, k + 1) == read(word, *q, k + 1):
                k += 1
            m = max(m, k)
        best[p] = m
    return best


def classical_L(word: str) -> int | float:
    lengths = piece_lengths(word)
    top = max(lengths.values(), default=0)
    return math.inf if top >= len(word) else top


def classical_girth(word: str) -> int | float:
    """Fewest pieces covering the cyclic word once around, minimised over starts and directions."""
    n = len(word)
    lengths = piece_lengths(word)
    best = math.inf
    for d in (1, -1):
        for s in range(n):
            pos, count = 0, 0
            while pos < n:
                start = (s + d * pos) % n if d > 0 else (s - pos) % n
                r = min(lengths[(start, d)], n - pos)
                if r == 0:
                    count = math.inf
                    break
                pos += r
                count += 1
            best = min(best, count)
    return best
