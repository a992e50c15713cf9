"""HTTP service exposing the decoder and metrics.

The expensive part of lexicon decoding is building the prefix tree, so the
service keeps built decoders in memory behind ids: POST /decoders once,
then POST /decoders/{id}/decode per matrix.  Batch jobs (decode a whole
run, evaluate, corpus experiment) go through /runs/* with inline corpora.

Validation failures map to HTTP 400 with ``detail.kind`` "invalid_input";
blown enumeration caps map to "cap_exceeded"; unknown ids to 404.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from importlib import metadata

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from ..ctc import Alphabet, LogitMatrix, best_path_decode, best_path_probability, softmax_rows
from ..errors import CapExceededError, InputError
from ..lexicon import Corpus, PrefixTree, WordCharSet, build_tree
from ..pipeline import corpus_experiment, decode_run, evaluate_run
from ..metrics import cer, improvement_report, wer
from ..wbs import DecodeConfig, select_beam, wbs_search
from . import models


def _package_version() -> str:
    try:
        return metadata.version("lexidecode")
    except metadata.PackageNotFoundError:
        return "0.0.0"


@dataclass(frozen=True)
class BoundDecoder:
    """A decoding context held by the service: alphabet, word characters,
    corpus, its prefix tree, and the search configuration."""

    decoder_id: str
    alphabet: Alphabet
    word_chars: WordCharSet
    corpus: Corpus
    tree: PrefixTree
    config: DecodeConfig

    def info(self) -> models.DecoderInfo:
        return models.DecoderInfo(
            decoder_id=self.decoder_id,
            alphabet=self.alphabet.chars,
            word_chars="".join(sorted(self.word_chars.members)),
            word_count=self.corpus.word_count,
            node_count=self.tree.node_count,
            beam_width=self.config.beam_width,
            require_complete_words=self.config.require_complete_words,
            log_space=self.config.log_space,
        )


def _check_word_chars(alphabet: Alphabet, word_chars: WordCharSet) -> None:
    stray = sorted(ch for ch in word_chars.members if not alphabet.contains(ch))
    if stray:
        raise InputError(f"word characters not in the alphabet: {stray!r}")


def _bind(
    alphabet_chars: str,
    word_chars_str: str,
    corpus_words: list[str],
    beam_width: int,
    require_complete_words: bool,
    log_space: bool,
    decoder_id: str = "",
    corpus_name: str = "",
) -> BoundDecoder:
    alphabet = Alphabet(alphabet_chars)
    word_chars = WordCharSet.from_string(word_chars_str)
    _check_word_chars(alphabet, word_chars)
    corpus = Corpus.from_words(corpus_words, word_chars, source_description=corpus_name)
    config = DecodeConfig(
        beam_width=beam_width,
        require_complete_words=require_complete_words,
        log_space=log_space,
    )
    return BoundDecoder(decoder_id, alphabet, word_chars, corpus, build_tree(corpus), config)


def create_app() -> FastAPI:
    app = FastAPI(title="lexidecode", version=_package_version())
    decoders: dict[str, BoundDecoder] = {}
    ids = itertools.count(1)
    lock = threading.Lock()

    @app.exception_handler(InputError)
    async def on_input_error(request: Request, exc: InputError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": {"kind": "invalid_input", "message": str(exc)}},
        )

    @app.exception_handler(CapExceededError)
    async def on_cap_exceeded(request: Request, exc: CapExceededError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": {"kind": "cap_exceeded", "message": str(exc)}},
        )

    def get_decoder(decoder_id: str) -> BoundDecoder:
        bound = decoders.get(decoder_id)
        if bound is None:
            raise HTTPException(
                status_code=404,
                detail={"kind": "not_found", "message": f"no decoder {decoder_id!r}"},
            )
        return bound

    @app.get("/health", response_model=models.HealthResponse)
    def health() -> models.HealthResponse:
        return models.HealthResponse(version=_package_version())

    @app.post("/decoders", response_model=models.DecoderInfo, status_code=201)
    def create_decoder(spec: models.DecoderSpec) -> models.DecoderInfo:
        with lock:
            decoder_id = f"dec-{next(ids):06d}"
        bound = _bind(
            spec.alphabet,
            spec.word_chars,
            spec.corpus_words,
            spec.beam_width,
            spec.require_complete_words,
            spec.log_space,
            decoder_id=decoder_id,
        )
        decoders[decoder_id] = bound
        return bound.info()

    @app.get("/decoders/{decoder_id}", response_model=models.DecoderInfo)
    def read_decoder(decoder_id: str) -> models.DecoderInfo:
        return get_decoder(decoder_id).info()

    @app.delete("/decoders/{decoder_id}", status_code=204)
    def delete_decoder(decoder_id: str) -> None:
        get_decoder(decoder_id)
        del decoders[decoder_id]

    @app.post("/decoders/{decoder_id}/decode", response_model=models.DecodeResponse)
    def decode(decoder_id: str, req: models.DecodeRequest) -> models.DecodeResponse:
        bound = get_decoder(decoder_id)
        m = models.to_matrix(req.matrix, req.kind)
        prob = softmax_rows(m) if isinstance(m, LogitMatrix) else m
        if req.decoder == "greedy":
            text = best_path_decode(prob, bound.alphabet)
            return models.DecodeResponse(text=text, score=best_path_probability(prob))
        beams = wbs_search(prob, bound.tree, bound.word_chars, bound.alphabet, bound.config)
        best = select_beam(beams, bound.tree, bound.config)
        return models.DecodeResponse(text=best.text, score=best.score)

    @app.post("/metrics/cer", response_model=models.MetricResponse)
    def metrics_cer(payload: models.PairsPayload) -> models.MetricResponse:
        return models.metric_response(cer(payload.pairs))

    @app.post("/metrics/wer", response_model=models.MetricResponse)
    def metrics_wer(payload: models.WordPairsPayload) -> models.MetricResponse:
        word_chars = WordCharSet.from_string(payload.word_chars)
        return models.metric_response(wer(payload.pairs, word_chars))

    @app.post("/metrics/improvement", response_model=models.ImprovementResponse)
    def metrics_improvement(payload: models.ImprovementPayload) -> models.ImprovementResponse:
        return models.improvement_response(
            improvement_report(payload.baseline, payload.improved)
        )

    @app.post("/runs/decode", response_model=models.RunDecodeResponse)
    def runs_decode(req: models.RunDecodeRequest) -> models.RunDecodeResponse:
        bound = _bind(
            req.alphabet,
            req.word_chars,
            req.corpus_words,
            req.beam_width,
            req.require_complete_words,
            req.log_space,
        )
        # Matrices are validated while building the records, so a bad one
        # must only take down its own paragraph, same as during decoding.
        results: list[models.ParagraphResult] = []
        good = []
        errors: dict[int, str] = {}
        for i, p in enumerate(req.paragraphs):
            try:
                good.append(models.to_paragraphs([p])[0])
            except InputError as exc:
                errors[i] = str(exc)
        transcripts = iter(
            decode_run(
                good,
                bound.tree,
                bound.config,
                bound.alphabet,
                bound.word_chars,
                jobs=req.jobs,
                decoder=req.decoder,
            )
        )
        for i, p in enumerate(req.paragraphs):
            if i in errors:
                results.append(models.ParagraphResult(id=p.id, error=errors[i]))
            else:
                t = next(transcripts)
                results.append(models.ParagraphResult(id=t.id, text=t.text, error=t.error))
        return models.RunDecodeResponse(paragraphs=results)

    @app.post("/runs/eval", response_model=models.RunReportResponse)
    def runs_eval(req: models.RunEvalRequest) -> models.RunReportResponse:
        if not req.variants:
            raise InputError("evaluation needs at least one corpus variant")
        alphabet = Alphabet(req.alphabet)
        word_chars = WordCharSet.from_string(req.word_chars)
        _check_word_chars(alphabet, word_chars)
        config = DecodeConfig(
            beam_width=req.beam_width,
            require_complete_words=req.require_complete_words,
            log_space=req.log_space,
        )
        paragraphs = models.to_paragraphs(req.paragraphs)
        variants = [
            (v.name, models.to_corpus(v.corpus_words, word_chars, v.name))
            for v in req.variants
        ]
        if len(variants) == 1:
            name, corpus = variants[0]
            report = evaluate_run(
                paragraphs, corpus, config, alphabet, word_chars, variant=name, jobs=req.jobs
            )
        else:
            report = corpus_experiment(
                paragraphs, variants, config, alphabet, word_chars, jobs=req.jobs
            )
        return models.run_report_response(report)

    return app
