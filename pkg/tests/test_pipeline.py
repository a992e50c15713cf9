import numpy as np
import pytest

from lexidecode import (
    Alphabet,
    Corpus,
    DecodeConfig,
    InputError,
    LineRecord,
    LogitMatrix,
    ParagraphRecord,
    ProbMatrix,
    WordCharSet,
    build_tree,
    compare_decoders,
    corpus_experiment,
    corpus_table_csv,
    decode_paragraph,
    decode_run,
    evaluate_run,
    run_report_csv,
)
from conftest import random_prob_matrix

A = Alphabet("ab ")
WC = WordCharSet.from_string("ab")
CORPUS = Corpus.from_words(["ab"], WC)
TREE = build_tree(CORPUS)
CFG = DecodeConfig()

M_AB = ProbMatrix([[0.4, 0.5, 0.0, 0.1], [0.1, 0.8, 0.0, 0.1]])  # wbs "ab", greedy "b"
M_A = ProbMatrix([[0.6, 0.0, 0.0, 0.4], [0.6, 0.0, 0.0, 0.4]])  # both decode "a"


def paragraph(pid="p1"):
    return ParagraphRecord(pid, (LineRecord(M_AB, "ab"), LineRecord(M_A, "a")))


class TestParagraphs:
    def test_lines_joined_with_newline(self):
        assert decode_paragraph(paragraph(), TREE, CFG, A, WC) == "ab\na"

    def test_empty_paragraph_rejected(self):
        with pytest.raises(InputError):
            ParagraphRecord("p", ())


class TestDecodeRun:
    def test_decodes_in_order(self):
        out = decode_run([paragraph("x"), paragraph("y")], TREE, CFG, A, WC)
        assert [t.id for t in out] == ["x", "y"]
        assert all(t.text == "ab\na" and t.error is None for t in out)

    def test_greedy_decoder(self):
        out = decode_run([paragraph()], TREE, CFG, A, WC, decoder="greedy")
        assert out[0].text == "b\na"

    def test_unknown_decoder_rejected(self):
        with pytest.raises(InputError):
            decode_run([paragraph()], TREE, CFG, A, WC, decoder="viterbi")

    def test_bad_paragraph_isolated(self):
        narrow = ParagraphRecord("bad", (LineRecord(ProbMatrix([[0.5, 0.5]]), None),))
        out = decode_run([paragraph("good"), narrow], TREE, CFG, A, WC)
        assert out[0].text == "ab\na" and out[0].error is None
        assert out[1].id == "bad" and out[1].text is None
        assert "columns" in out[1].error

    def test_logit_lines_pass_through_softmax(self):
        line = LineRecord(LogitMatrix([[8.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 8.0]]))
        out = decode_run([ParagraphRecord("s", (line,))], TREE, CFG, A, WC)
        assert out[0].text == "a"

    def test_worker_count_does_not_change_output(self):
        rng = np.random.default_rng(19)
        paragraphs = [
            ParagraphRecord(
                f"p{i}",
                tuple(
                    LineRecord(random_prob_matrix(rng, int(rng.integers(1, 6)), 4))
                    for _ in range(int(rng.integers(1, 4)))
                ),
            )
            for i in range(6)
        ]
        serial = decode_run(paragraphs, TREE, CFG, A, WC, jobs=1)
        threaded = decode_run(paragraphs, TREE, CFG, A, WC, jobs=4)
        assert serial == threaded


class TestEvaluateRun:
    def test_known_run(self):
        report = evaluate_run([paragraph()], CORPUS, CFG, A, WC, variant="base")
        assert report.beam_width == 50
        row = report.rows[0]
        assert row.variant == "base"
        assert row.corpus_word_count == 1
        assert row.greedy.cer_percent == pytest.approx(100 / 3)
        assert row.greedy.wer_percent == pytest.approx(50.0)
        assert row.wbs.cer_percent == 0.0
        assert row.wbs.wer_percent == 0.0
        assert row.cer_improvement.improvement_percent == pytest.approx(100.0)
        assert row.wer_improvement.improvement_percent == pytest.approx(100.0)

    def test_missing_ground_truth_named(self):
        p = ParagraphRecord("p9", (LineRecord(M_AB, "ab"), LineRecord(M_A, None)))
        with pytest.raises(InputError, match="p9:1"):
            evaluate_run([p], CORPUS, CFG, A, WC)

    def test_perfect_baseline_leaves_improvement_undefined(self):
        # Greedy reads the truth; the lexicon decoder cannot reach "b".
        p = ParagraphRecord("q", (LineRecord(ProbMatrix([[0.0, 0.9, 0.0, 0.1]]), "b"),))
        report = evaluate_run([p], CORPUS, CFG, A, WC)
        row = report.rows[0]
        assert row.greedy.cer_percent == 0.0
        assert row.wbs.cer_percent == pytest.approx(100.0)
        assert row.cer_improvement.improvement_percent is None

    def test_perfect_both_improvement_zero(self):
        m = ProbMatrix([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
        p = ParagraphRecord("r", (LineRecord(m, "ab"),))
        report = evaluate_run([p], CORPUS, CFG, A, WC)
        assert report.rows[0].cer_improvement.improvement_percent == 0.0

    def test_jobs_do_not_change_report(self):
        report1 = evaluate_run([paragraph("a"), paragraph("b")], CORPUS, CFG, A, WC, jobs=1)
        report4 = evaluate_run([paragraph("a"), paragraph("b")], CORPUS, CFG, A, WC, jobs=4)
        assert report1 == report4


class TestCorpusExperiment:
    BIG = Corpus.from_words(["ab", "a", "b"], WC)

    def test_rows_per_variant_in_order(self):
        report = corpus_experiment(
            [paragraph()], [("small", CORPUS), ("big", self.BIG)], CFG, A, WC
        )
        assert [r.variant for r in report.rows] == ["small", "big"]
        small, big = report.rows
        # The wider corpus admits the greedy misreading "b", so constraint
        # quality degrades with corpus size here.
        assert small.wbs.cer_percent == 0.0
        assert big.wbs.cer_percent == pytest.approx(100 / 3)
        assert big.corpus_word_count == 3

    def test_requires_two_variants(self):
        with pytest.raises(InputError):
            corpus_experiment([paragraph()], [("only", CORPUS)], CFG, A, WC)


class TestReportRendering:
    BIG = Corpus.from_words(["ab", "a", "b"], WC)

    def report(self):
        return evaluate_run([paragraph()], CORPUS, CFG, A, WC, variant="base")

    def test_compare_lines(self):
        assert compare_decoders(self.report()) == [
            "metric,greedy,wbs,improvement_percent",
            "CER,33.33,0.00,100.00",
            "WER,50.00,0.00,100.00",
        ]

    def test_compare_undefined_improvement_left_empty(self):
        p = ParagraphRecord("q", (LineRecord(ProbMatrix([[0.0, 0.9, 0.0, 0.1]]), "b"),))
        report = evaluate_run([p], CORPUS, CFG, A, WC)
        assert compare_decoders(report)[1] == "CER,0.00,100.00,"

    def test_run_report_csv(self):
        assert run_report_csv(self.report()) == (
            "variant,decoder,cer_percent,wer_percent,char_edits,char_total,"
            "word_edits,word_total\n"
            "base,greedy,33.33,50.00,1,3,1,2\n"
            "base,wbs,0.00,0.00,0,3,0,2\n"
        )

    def test_corpus_table_csv(self):
        report = corpus_experiment(
            [paragraph()], [("small", CORPUS), ("big", self.BIG)], CFG, A, WC
        )
        assert corpus_table_csv(report) == (
            "variant,corpus_words,cer_percent,wer_percent\n"
            "small,1,0.00,0.00\n"
            "big,3,33.33,50.00\n"
        )
