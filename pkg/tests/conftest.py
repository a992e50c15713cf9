"""Shared test helpers: seeded matrix generators and independent
reference implementations used to cross-check the fast code paths."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from lexidecode import Alphabet, ProbMatrix


def random_prob_matrix(rng: np.random.Generator, t: int, cols: int) -> ProbMatrix:
    rows = rng.random((t, cols)) + 1e-9
    rows /= rows.sum(axis=1, keepdims=True)
    return ProbMatrix(rows)


def quantized_prob_matrix(rng: np.random.Generator, t: int, cols: int, grid: int = 8) -> ProbMatrix:
    """Rows on the 1/grid lattice, so exact ties between columns happen."""
    rows = np.zeros((t, cols))
    for i in range(t):
        counts = rng.multinomial(grid, np.ones(cols) / cols)
        rows[i] = counts / grid
    return ProbMatrix(rows)


def levenshtein_reference(a: str, b: str) -> int:
    """Memoized recursive edit distance, independent of the shipped
    iterative version."""

    @lru_cache(maxsize=None)
    def dist(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        sub = 0 if a[i - 1] == b[j - 1] else 1
        return min(dist(i - 1, j) + 1, dist(i, j - 1) + 1, dist(i - 1, j - 1) + sub)

    return dist(len(a), len(b))


def greedy_reference(m: ProbMatrix, alphabet: Alphabet) -> str:
    """Plain-loop argmax + collapse, written without numpy so it cannot
    share a bug with the shipped decoder."""
    out: list[str] = []
    prev = -1
    for row in m.frames:
        best, best_p = 0, float(row[0])
        for j in range(1, len(row)):
            if float(row[j]) > best_p:
                best, best_p = j, float(row[j])
        if best != prev and best != alphabet.blank_index:
            out.append(alphabet.chars[best])
        prev = best
    return "".join(out)
