"""Batch decoding and evaluation: per-line decoding with both decoders,
paragraph assembly by line concatenation, CER/WER aggregation, decoder
improvement, and the corpus-size experiment.

All decoding here is per line; paragraphs are joined with a single "\\n".
Metrics are computed over per-line pairs, so the artificial separator is
never scored.  Lines are embarrassingly parallel and reports are
independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .ctc import (
    Alphabet,
    LogitMatrix,
    ProbMatrix,
    _check_matrix_alphabet,
    best_path_decode,
    softmax_rows,
)
from .errors import InputError
from .lexicon import Corpus, PrefixTree, WordCharSet, build_tree
from .metrics import (
    ImprovementReport,
    MetricReport,
    cer,
    improvement,
    wer,
)
from .wbs import DecodeConfig, wbs_decode

LINE_SEPARATOR = "\n"


@dataclass(frozen=True)
class LineRecord:
    matrix: ProbMatrix | LogitMatrix
    ground_truth: str | None = None


@dataclass(frozen=True)
class ParagraphRecord:
    id: str
    lines: tuple[LineRecord, ...]

    def __post_init__(self) -> None:
        if not self.lines:
            raise InputError(f"paragraph {self.id!r} has no lines")


@dataclass(frozen=True)
class ParagraphTranscript:
    id: str
    text: str | None = None
    error: str | None = None


@dataclass(frozen=True)
class VariantReport:
    """Greedy-vs-WBS comparison for one corpus variant."""

    variant: str
    corpus_word_count: int
    greedy: MetricReport
    wbs: MetricReport
    cer_improvement: ImprovementReport
    wer_improvement: ImprovementReport


@dataclass(frozen=True)
class RunReport:
    beam_width: int
    require_complete_words: bool
    log_space: bool
    rows: tuple[VariantReport, ...]


def _as_prob(matrix: ProbMatrix | LogitMatrix) -> ProbMatrix:
    if isinstance(matrix, LogitMatrix):
        return softmax_rows(matrix)
    return matrix


def decode_line(
    line: LineRecord,
    tree: PrefixTree,
    config: DecodeConfig,
    alphabet: Alphabet,
    word_chars: WordCharSet,
) -> str:
    return wbs_decode(_as_prob(line.matrix), tree, word_chars, alphabet, config)


def decode_paragraph(
    paragraph: ParagraphRecord,
    tree: PrefixTree,
    config: DecodeConfig,
    alphabet: Alphabet,
    word_chars: WordCharSet,
) -> str:
    """Decode each line in order and join with a single line break."""
    texts = [decode_line(line, tree, config, alphabet, word_chars) for line in paragraph.lines]
    return LINE_SEPARATOR.join(texts)


def _map_lines(
    paragraphs: Sequence[ParagraphRecord],
    fn: Callable[[LineRecord], str],
    jobs: int,
) -> list[list[str]]:
    """Apply ``fn`` to every line, optionally in a thread pool.  Results are
    grouped back per paragraph in order, so the output is independent of
    the worker count."""
    flat = [line for p in paragraphs for line in p.lines]
    if jobs > 1 and len(flat) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            decoded = list(pool.map(fn, flat))
    else:
        decoded = [fn(line) for line in flat]
    grouped: list[list[str]] = []
    cursor = 0
    for p in paragraphs:
        grouped.append(decoded[cursor : cursor + len(p.lines)])
        cursor += len(p.lines)
    return grouped


def decode_run(
    paragraphs: Sequence[ParagraphRecord],
    tree: PrefixTree,
    config: DecodeConfig,
    alphabet: Alphabet,
    word_chars: WordCharSet,
    jobs: int = 1,
    decoder: str = "wbs",
) -> list[ParagraphTranscript]:
    """Decode every paragraph.  A malformed or mis-shaped matrix aborts
    only its own paragraph, which gets an error entry instead of a
    transcript.  ``decoder`` is "wbs" or "greedy"."""
    if decoder not in ("wbs", "greedy"):
        raise InputError(f"unknown decoder {decoder!r}")
    results: list[ParagraphTranscript] = []

    def decode_one(line: LineRecord) -> str:
        if decoder == "greedy":
            return best_path_decode(_as_prob(line.matrix), alphabet)
        return decode_line(line, tree, config, alphabet, word_chars)

    # Validate and decode per paragraph so one bad matrix cannot poison the
    # whole run; parallelism stays within the good paragraphs.
    good: list[ParagraphRecord] = []
    errors: dict[str, str] = {}
    for p in paragraphs:
        try:
            for line in p.lines:
                _check_matrix_alphabet(_as_prob(line.matrix), alphabet)
        except InputError as exc:
            errors[p.id] = str(exc)
            continue
        good.append(p)

    grouped = _map_lines(good, decode_one, jobs)
    texts = {p.id: LINE_SEPARATOR.join(lines) for p, lines in zip(good, grouped)}
    for p in paragraphs:
        if p.id in errors:
            results.append(ParagraphTranscript(p.id, error=errors[p.id]))
        else:
            results.append(ParagraphTranscript(p.id, text=texts[p.id]))
    return results


def _line_pairs(
    paragraphs: Sequence[ParagraphRecord], decoded: list[list[str]]
) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    for p, texts in zip(paragraphs, decoded):
        for line, text in zip(p.lines, texts):
            assert line.ground_truth is not None
            pairs.append((line.ground_truth, text))
    return pairs


def _safe_improvement(baseline: float, improved: float) -> ImprovementReport:
    # A perfect baseline leaves nothing to improve; Eq.-style division is
    # undefined there, so report 0 when both decoders are perfect.
    if baseline == 0.0:
        pct = 0.0 if improved == 0.0 else None
        return ImprovementReport(baseline, improved, pct)
    return ImprovementReport(baseline, improved, improvement(baseline, improved))


def _require_ground_truth(paragraphs: Sequence[ParagraphRecord]) -> None:
    missing = [
        f"{p.id}:{i}"
        for p in paragraphs
        for i, line in enumerate(p.lines)
        if line.ground_truth is None
    ]
    if missing:
        raise InputError("lines without ground truth: " + ", ".join(missing))


def _evaluate_variant(
    paragraphs: Sequence[ParagraphRecord],
    variant: str,
    corpus: Corpus,
    config: DecodeConfig,
    alphabet: Alphabet,
    word_chars: WordCharSet,
    jobs: int,
) -> VariantReport:
    tree = build_tree(corpus)

    def wbs_one(line: LineRecord) -> str:
        return decode_line(line, tree, config, alphabet, word_chars)

    def greedy_one(line: LineRecord) -> str:
        return best_path_decode(_as_prob(line.matrix), alphabet)

    greedy_pairs = _line_pairs(paragraphs, _map_lines(paragraphs, greedy_one, jobs))
    wbs_pairs = _line_pairs(paragraphs, _map_lines(paragraphs, wbs_one, jobs))

    greedy_report = cer(greedy_pairs).merged_with(wer(greedy_pairs, word_chars))
    wbs_report = cer(wbs_pairs).merged_with(wer(wbs_pairs, word_chars))
    return VariantReport(
        variant=variant,
        corpus_word_count=corpus.word_count,
        greedy=greedy_report,
        wbs=wbs_report,
        cer_improvement=_safe_improvement(greedy_report.cer_percent, wbs_report.cer_percent),
        wer_improvement=_safe_improvement(greedy_report.wer_percent, wbs_report.wer_percent),
    )


def evaluate_run(
    paragraphs: Sequence[ParagraphRecord],
    corpus: Corpus,
    config: DecodeConfig,
    alphabet: Alphabet,
    word_chars: WordCharSet,
    variant: str = "corpus",
    jobs: int = 1,
) -> RunReport:
    """Decode every line with both the greedy and the lexicon decoder and
    aggregate CER/WER per decoder, plus the improvement of the lexicon
    decoder over the greedy baseline."""
    _require_ground_truth(paragraphs)
    row = _evaluate_variant(paragraphs, variant, corpus, config, alphabet, word_chars, jobs)
    return RunReport(config.beam_width, config.require_complete_words, config.log_space, (row,))


def corpus_experiment(
    paragraphs: Sequence[ParagraphRecord],
    variants: Sequence[tuple[str, Corpus]],
    config: DecodeConfig,
    alphabet: Alphabet,
    word_chars: WordCharSet,
    jobs: int = 1,
) -> RunReport:
    """One evaluation per corpus variant, reported as a table keyed by the
    variant name."""
    if len(variants) < 2:
        raise InputError("corpus experiment needs at least 2 corpus variants")
    _require_ground_truth(paragraphs)
    rows = tuple(
        _evaluate_variant(paragraphs, name, corpus, config, alphabet, word_chars, jobs)
        for name, corpus in variants
    )
    return RunReport(config.beam_width, config.require_complete_words, config.log_space, rows)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def compare_decoders(report: RunReport) -> list[str]:
    """CSV rows comparing the decoders on the report's bound corpus (its
    first variant): metric, greedy, wbs, improvement percent."""
    if not report.rows:
        raise InputError("report has no variant rows")
    row = report.rows[0]
    return [
        "metric,greedy,wbs,improvement_percent",
        f"CER,{_fmt(row.greedy.cer_percent)},{_fmt(row.wbs.cer_percent)},"
        f"{_fmt(row.cer_improvement.improvement_percent)}",
        f"WER,{_fmt(row.greedy.wer_percent)},{_fmt(row.wbs.wer_percent)},"
        f"{_fmt(row.wer_improvement.improvement_percent)}",
    ]


def run_report_csv(report: RunReport) -> str:
    """Fixed-column report: variant, decoder, cer_percent, wer_percent,
    char_edits, char_total, word_edits, word_total."""
    lines = ["variant,decoder,cer_percent,wer_percent,char_edits,char_total,word_edits,word_total"]
    for row in report.rows:
        for decoder, metric in (("greedy", row.greedy), ("wbs", row.wbs)):
            lines.append(
                f"{row.variant},{decoder},{_fmt(metric.cer_percent)},{_fmt(metric.wer_percent)},"
                f"{metric.char_edits},{metric.char_total},{metric.word_edits},{metric.word_total}"
            )
    return "\n".join(lines) + "\n"


def corpus_table_csv(report: RunReport) -> str:
    """Corpus-size table: one row per variant with the lexicon decoder's
    CER/WER, the shape used to study corpus growth."""
    lines = ["variant,corpus_words,cer_percent,wer_percent"]
    for row in report.rows:
        lines.append(
            f"{row.variant},{row.corpus_word_count},"
            f"{_fmt(row.wbs.cer_percent)},{_fmt(row.wbs.wer_percent)}"
        )
    return "\n".join(lines) + "\n"
