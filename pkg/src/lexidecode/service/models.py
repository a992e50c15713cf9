"""Wire models for the HTTP service, plus converters to and from the core
dataclasses.  Matrices travel as nested float lists; reports mirror the
core report types field for field so clients see full-precision values."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..ctc import Alphabet, LogitMatrix, ProbMatrix
from ..lexicon import Corpus, WordCharSet
from ..metrics import ImprovementReport, MetricReport
from ..pipeline import LineRecord, ParagraphRecord, RunReport, VariantReport

MatrixKind = Literal["prob", "logit"]


class DecoderSpec(BaseModel):
    alphabet: str
    word_chars: str
    corpus_words: list[str]
    beam_width: int = 50
    require_complete_words: bool = False
    log_space: bool = False


class DecoderInfo(BaseModel):
    decoder_id: str
    alphabet: str
    word_chars: str
    word_count: int
    node_count: int
    beam_width: int
    require_complete_words: bool
    log_space: bool


class MatrixPayload(BaseModel):
    matrix: list[list[float]]
    kind: MatrixKind = "prob"


class DecodeRequest(MatrixPayload):
    decoder: Literal["wbs", "greedy"] = "wbs"


class DecodeResponse(BaseModel):
    text: str
    score: float


class PairsPayload(BaseModel):
    pairs: list[tuple[str, str]] = Field(description="(ground truth, prediction) pairs")


class WordPairsPayload(PairsPayload):
    word_chars: str


class MetricResponse(BaseModel):
    pair_count: int
    cer_percent: Optional[float] = None
    char_edits: Optional[int] = None
    char_total: Optional[int] = None
    wer_percent: Optional[float] = None
    word_edits: Optional[int] = None
    word_total: Optional[int] = None


class ImprovementPayload(BaseModel):
    baseline: float
    improved: float


class ImprovementResponse(ImprovementPayload):
    improvement_percent: Optional[float]


class LinePayload(BaseModel):
    matrix: list[list[float]]
    kind: MatrixKind = "prob"
    ground_truth: Optional[str] = None


class ParagraphPayload(BaseModel):
    id: str
    lines: list[LinePayload]


class RunDecodeRequest(DecoderSpec):
    paragraphs: list[ParagraphPayload]
    decoder: Literal["wbs", "greedy"] = "wbs"
    jobs: int = 1


class ParagraphResult(BaseModel):
    id: str
    text: Optional[str] = None
    error: Optional[str] = None


class RunDecodeResponse(BaseModel):
    paragraphs: list[ParagraphResult]


class CorpusVariant(BaseModel):
    name: str
    corpus_words: list[str]


class RunEvalRequest(BaseModel):
    alphabet: str
    word_chars: str
    variants: list[CorpusVariant]
    paragraphs: list[ParagraphPayload]
    beam_width: int = 50
    require_complete_words: bool = False
    log_space: bool = False
    jobs: int = 1


class VariantRow(BaseModel):
    variant: str
    corpus_word_count: int
    greedy: MetricResponse
    wbs: MetricResponse
    cer_improvement: ImprovementResponse
    wer_improvement: ImprovementResponse


class RunReportResponse(BaseModel):
    beam_width: int
    require_complete_words: bool
    log_space: bool
    rows: list[VariantRow]


class HealthResponse(BaseModel):
    status: Literal["ok"] = "ok"
    version: str


def to_matrix(rows: list[list[float]], kind: MatrixKind) -> ProbMatrix | LogitMatrix:
    return ProbMatrix(rows) if kind == "prob" else LogitMatrix(rows)


def to_paragraphs(payloads: list[ParagraphPayload]) -> list[ParagraphRecord]:
    return [
        ParagraphRecord(
            id=p.id,
            lines=tuple(
                LineRecord(to_matrix(line.matrix, line.kind), line.ground_truth)
                for line in p.lines
            ),
        )
        for p in payloads
    ]


def to_corpus(words: list[str], word_chars: WordCharSet, name: str = "") -> Corpus:
    return Corpus.from_words(words, word_chars, source_description=name)


def metric_response(report: MetricReport) -> MetricResponse:
    return MetricResponse(
        pair_count=report.pair_count,
        cer_percent=report.cer_percent,
        char_edits=report.char_edits,
        char_total=report.char_total,
        wer_percent=report.wer_percent,
        word_edits=report.word_edits,
        word_total=report.word_total,
    )


def improvement_response(report: ImprovementReport) -> ImprovementResponse:
    return ImprovementResponse(
        baseline=report.baseline,
        improved=report.improved,
        improvement_percent=report.improvement_percent,
    )


def variant_row(row: VariantReport) -> VariantRow:
    return VariantRow(
        variant=row.variant,
        corpus_word_count=row.corpus_word_count,
        greedy=metric_response(row.greedy),
        wbs=metric_response(row.wbs),
        cer_improvement=improvement_response(row.cer_improvement),
        wer_improvement=improvement_response(row.wer_improvement),
    )


def run_report_response(report: RunReport) -> RunReportResponse:
    return RunReportResponse(
        beam_width=report.beam_width,
        require_complete_words=report.require_complete_words,
        log_space=report.log_space,
        rows=[variant_row(row) for row in report.rows],
    )


def run_report_from_response(payload: RunReportResponse) -> RunReport:
    """Rebuild a core report from its wire form (used by the client side)."""

    def metric(m: MetricResponse) -> MetricReport:
        return MetricReport(
            pair_count=m.pair_count,
            cer_percent=m.cer_percent,
            char_edits=m.char_edits,
            char_total=m.char_total,
            wer_percent=m.wer_percent,
            word_edits=m.word_edits,
            word_total=m.word_total,
        )

    rows = tuple(
        VariantReport(
            variant=row.variant,
            corpus_word_count=row.corpus_word_count,
            greedy=metric(row.greedy),
            wbs=metric(row.wbs),
            cer_improvement=ImprovementReport(
                row.cer_improvement.baseline,
                row.cer_improvement.improved,
                row.cer_improvement.improvement_percent,
            ),
            wer_improvement=ImprovementReport(
                row.wer_improvement.baseline,
                row.wer_improvement.improved,
                row.wer_improvement.improvement_percent,
            ),
        )
        for row in payload.rows
    )
    return RunReport(
        beam_width=payload.beam_width,
        require_complete_words=payload.require_complete_words,
        log_space=payload.log_space,
        rows=rows,
    )


def make_alphabet(chars: str) -> Alphabet:
    return Alphabet(chars)


def make_word_chars(chars: str) -> WordCharSet:
    return WordCharSet.from_string(chars)
