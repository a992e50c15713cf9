"""Edit-distance evaluation: Levenshtein distance, CER and WER as a ratio
of summed edits over summed ground-truth lengths, and the relative
improvement of one error rate over another.

CER/WER aggregate as a single ratio of sums across all pairs, not as a
mean of per-line ratios.  Comparison is case-sensitive; punctuation counts
as ordinary characters at the character level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InputError, UndefinedMetricError
from .lexicon import WordCharSet, tokenize

EvalPair = tuple[str, str]  # (ground truth, prediction)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimum number of single-element insertions, deletions and
    substitutions (unit costs) transforming ``a`` into ``b``.  Works over
    strings or token lists."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1])
            else:
                current.append(1 + min(previous[j - 1], previous[j], current[-1]))
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class MetricReport:
    """Error tallies over a pair list.  ``cer`` fills the character side,
    ``wer`` the word side; run evaluation merges both."""

    pair_count: int
    cer_percent: float | None = None
    char_edits: int | None = None
    char_total: int | None = None
    wer_percent: float | None = None
    word_edits: int | None = None
    word_total: int | None = None

    def merged_with(self, other: "MetricReport") -> "MetricReport":
        if self.pair_count != other.pair_count:
            raise InputError("cannot merge reports over different pair lists")
        pick = lambda a, b: a if a is not None else b
        return MetricReport(
            pair_count=self.pair_count,
            cer_percent=pick(self.cer_percent, other.cer_percent),
            char_edits=pick(self.char_edits, other.char_edits),
            char_total=pick(self.char_total, other.char_total),
            wer_percent=pick(self.wer_percent, other.wer_percent),
            word_edits=pick(self.word_edits, other.word_edits),
            word_total=pick(self.word_total, other.word_total),
        )


@dataclass(frozen=True)
class ImprovementReport:
    baseline: float
    improved: float
    improvement_percent: float | None


def cer(pairs: Sequence[EvalPair]) -> MetricReport:
    """Character error rate: 100 * sum of edit distances over the total
    ground-truth character count."""
    edits = sum(levenshtein(g, p) for g, p in pairs)
    total = sum(len(g) for g, _ in pairs)
    if total == 0:
        raise UndefinedMetricError("CER is undefined: ground truths hold no characters")
    return MetricReport(
        pair_count=len(pairs),
        cer_percent=100.0 * edits / total,
        char_edits=edits,
        char_total=total,
    )


def wer(pairs: Sequence[EvalPair], word_chars: WordCharSet) -> MetricReport:
    """Word error rate: like CER but over word tokens, normalised by the
    total ground-truth word count."""
    edits = 0
    total = 0
    for g, p in pairs:
        g_tokens = tokenize(g, word_chars)
        p_tokens = tokenize(p, word_chars)
        edits += levenshtein(g_tokens, p_tokens)
        total += len(g_tokens)
    if total == 0:
        raise UndefinedMetricError("WER is undefined: ground truths hold no words")
    return MetricReport(
        pair_count=len(pairs),
        wer_percent=100.0 * edits / total,
        word_edits=edits,
        word_total=total,
    )


def improvement(baseline: float, improved: float) -> float:
    """Relative drop of an error rate against its baseline, in percent.
    Full precision; round only when rendering reports."""
    if baseline <= 0:
        raise InputError(f"improvement needs a positive baseline, got {baseline!r}")
    return 100.0 * (baseline - improved) / baseline


def improvement_report(baseline: float, improved: float) -> ImprovementReport:
    return ImprovementReport(baseline, improved, improvement(baseline, improved))
