"""CTC primitives: alphabets, per-frame probability matrices, path collapse,
greedy decoding, the exact forward algorithm, and a brute-force decoder used
as an oracle in tests.

Conventions used throughout the package:

* A matrix row holds one frame; column ``j < C`` is the probability of
  character ``j`` of the alphabet, and the last column (index ``C``) is the
  CTC blank.
* A "path" picks one column per frame.  Collapsing a path merges adjacent
  repeats first and then deletes blanks.
* Probabilities are accumulated in double precision, in linear space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapExceededError, InputError

ROW_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Alphabet:
    """Ordered character set of a dataset.  Blank is implicit and occupies
    the last matrix column, so ``blank_index == len(chars)``."""

    chars: str

    def __post_init__(self) -> None:
        if not self.chars:
            raise InputError("alphabet must contain at least one character")
        if len(set(self.chars)) != len(self.chars):
            raise InputError("alphabet contains duplicate characters")

    def __len__(self) -> int:
        return len(self.chars)

    @property
    def blank_index(self) -> int:
        return len(self.chars)

    @property
    def column_count(self) -> int:
        return len(self.chars) + 1

    def index_of(self, ch: str) -> int:
        idx = self.chars.find(ch)
        if idx < 0:
            raise InputError(f"character {ch!r} is not in the alphabet")
        return idx

    def contains(self, ch: str) -> bool:
        return ch in self.chars


def _as_frames(rows: np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    try:
        frames = np.asarray(rows, dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise InputError(f"matrix rows are ragged or non-numeric: {exc}")
    if frames.ndim == 1 and frames.size == 0:
        frames = frames.reshape(0, 0)
    if frames.ndim != 2:
        raise InputError(f"matrix must be two-dimensional, got shape {frames.shape}")
    if frames.shape[1] < 1 and frames.shape[0] > 0:
        raise InputError("matrix needs at least one column")
    frames = frames.copy()
    frames.setflags(write=False)
    return frames


class ProbMatrix:
    """T x (C+1) matrix of per-frame posteriors.  Rows are distributions:
    nonnegative, summing to 1 within ROW_SUM_TOLERANCE."""

    __slots__ = ("frames",)

    def __init__(self, rows: np.ndarray | Sequence[Sequence[float]]):
        frames = _as_frames(rows)
        if not np.all(np.isfinite(frames)):
            raise InputError("probability matrix contains non-finite entries")
        if frames.size and np.any(frames < 0.0):
            raise InputError("probability matrix contains negative entries")
        if frames.shape[0]:
            sums = frames.sum(axis=1)
            bad = np.abs(sums - 1.0) > ROW_SUM_TOLERANCE
            if np.any(bad):
                t = int(np.argmax(bad))
                raise InputError(
                    f"matrix row {t} sums to {sums[t]!r}, expected 1 within {ROW_SUM_TOLERANCE}"
                )
        self.frames = frames

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def column_count(self) -> int:
        return self.frames.shape[1]


class LogitMatrix:
    """T x (C+1) matrix of unnormalised scores; finite entries only."""

    __slots__ = ("frames",)

    def __init__(self, rows: np.ndarray | Sequence[Sequence[float]]):
        frames = _as_frames(rows)
        if not np.all(np.isfinite(frames)):
            raise InputError("logit matrix contains non-finite entries")
        self.frames = frames

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def column_count(self) -> int:
        return self.frames.shape[1]


def _check_matrix_alphabet(m: ProbMatrix, alphabet: Alphabet) -> None:
    if m.frame_count and m.column_count != alphabet.column_count:
        raise InputError(
            f"matrix has {m.column_count} columns, alphabet requires "
            f"{alphabet.column_count} (characters + blank)"
        )


def softmax_rows(m: LogitMatrix) -> ProbMatrix:
    """Exp-normalise each row independently, subtracting the row maximum
    first for numerical stability."""
    frames = m.frames
    if frames.shape[0] == 0:
        return ProbMatrix(frames)
    shifted = frames - frames.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return ProbMatrix(exp / exp.sum(axis=1, keepdims=True))


def collapse(path: Sequence[int], alphabet: Alphabet) -> str:
    """Map a per-frame column-index path to its labeling: merge runs of
    identical indices, drop blanks, translate the rest to characters."""
    blank = alphabet.blank_index
    out: list[str] = []
    prev = -1
    for idx in path:
        if idx < 0 or idx > blank:
            raise InputError(f"path index {idx} out of range for alphabet of size {len(alphabet)}")
        if idx != prev and idx != blank:
            out.append(alphabet.chars[idx])
        prev = idx
    return "".join(out)


def best_path_decode(m: ProbMatrix, alphabet: Alphabet) -> str:
    """Greedy decoding: collapse the per-frame argmax path.  Ties break
    toward the lowest column index.  An empty matrix decodes to ""."""
    _check_matrix_alphabet(m, alphabet)
    if m.frame_count == 0:
        return ""
    return collapse(np.argmax(m.frames, axis=1).tolist(), alphabet)


def best_path_probability(m: ProbMatrix) -> float:
    """Probability of the single most likely path (the one greedy decoding
    collapses).  The empty matrix has exactly one path, probability 1."""
    if m.frame_count == 0:
        return 1.0
    return float(np.prod(np.max(m.frames, axis=1)))


def labeling_probability(m: ProbMatrix, labeling: str, alphabet: Alphabet) -> float:
    """Exact probability that the matrix emits ``labeling``: the sum over
    all paths that collapse to it, computed with the blank-augmented
    forward recursion in O(T * len(labeling)).

    Unrealisable labelings (needing more frames than the matrix has, with
    a forced blank between repeated characters) score exactly 0.  An empty
    matrix gives probability 1 to the empty labeling and 0 to any other.
    """
    _check_matrix_alphabet(m, alphabet)
    frames = m.frames
    t_count = m.frame_count
    if t_count == 0:
        return 1.0 if labeling == "" else 0.0

    blank = alphabet.blank_index
    label_idx = [alphabet.index_of(ch) for ch in labeling]
    # Augmented sequence: blank, l1, blank, l2, ..., blank.
    aug = [blank]
    for idx in label_idx:
        aug.append(idx)
        aug.append(blank)
    s_count = len(aug)

    forced = sum(1 for a, b in zip(label_idx, label_idx[1:]) if a == b)
    if len(label_idx) + forced > t_count:
        return 0.0

    alpha = [0.0] * s_count
    alpha[0] = float(frames[0][blank])
    if s_count > 1:
        alpha[0 + 1] = float(frames[0][aug[1]])
    for t in range(1, t_count):
        row = frames[t]
        nxt = [0.0] * s_count
        for s in range(s_count):
            total = alpha[s]
            if s >= 1:
                total += alpha[s - 1]
            if s >= 2 and aug[s] != blank and aug[s] != aug[s - 2]:
                total += alpha[s - 2]
            if total:
                nxt[s] = total * float(row[aug[s]])
        alpha = nxt

    result = alpha[s_count - 1]
    if s_count > 1:
        result += alpha[s_count - 2]
    return result


def enumerate_labeling_distribution(
    m: ProbMatrix, alphabet: Alphabet, max_paths: int = 1_000_000
) -> dict[str, float]:
    """Brute-force reference: walk every path and pool probability per
    collapsed labeling.  Labelings that no path produces are absent.

    Desk-scale only: refuses when (C+1)**T exceeds ``max_paths``.
    """
    _check_matrix_alphabet(m, alphabet)
    t_count = m.frame_count
    cols = alphabet.column_count
    if t_count and cols**t_count > max_paths:
        raise CapExceededError(
            f"{cols}**{t_count} paths exceed the enumeration cap of {max_paths}"
        )

    frames = m.frames
    pooled: dict[str, float] = {}
    for path in itertools.product(range(cols), repeat=t_count):
        p = 1.0
        for t, idx in enumerate(path):
            p *= float(frames[t][idx])
        text = collapse(path, alphabet)
        pooled[text] = pooled.get(text, 0.0) + p
    return pooled


def enumerate_decode(
    m: ProbMatrix, alphabet: Alphabet, max_paths: int = 1_000_000
) -> tuple[str, float]:
    """Brute-force decoder: the most probable labeling under the pooled
    path distribution and its probability.  Ties break toward the
    lexicographically smallest labeling."""
    pooled = enumerate_labeling_distribution(m, alphabet, max_paths)
    return min(pooled.items(), key=lambda kv: (-kv[1], kv[0]))
