import numpy as np
import pytest

from lexidecode.cli import main
from lexidecode.client import ServiceError
from lexidecode.formats import write_ctcm

M_AB = np.array([[0.4, 0.5, 0.0, 0.1], [0.1, 0.8, 0.0, 0.1]])  # wbs "ab", greedy "b"
M_A = np.array([[0.6, 0.0, 0.0, 0.4], [0.6, 0.0, 0.0, 0.4]])  # both decode "a"


@pytest.fixture()
def workspace(tmp_path):
    (tmp_path / "alphabet.txt").write_text("ab \n")
    (tmp_path / "base.txt").write_text("ab\n")
    (tmp_path / "wide.txt").write_text("ab a b\n")
    write_ctcm(tmp_path / "l1.ctcm", M_AB)
    write_ctcm(tmp_path / "l2.ctcm", M_A)
    (tmp_path / "l1.gt").write_text("ab\n")
    (tmp_path / "l2.gt").write_text("a\n")
    (tmp_path / "run.man").write_text(
        "ctcman 1\n"
        "alphabet = alphabet.txt\n"
        "word_chars = ab\n"
        "corpus = base base.txt\n"
        "corpus = wide wide.txt\n"
        "line = p1 l1.ctcm l1.gt\n"
        "line = p1 l2.ctcm l2.gt\n"
        "line = p2 l2.ctcm l2.gt\n"
    )
    return tmp_path


def run(workspace, *argv):
    return main([*argv, "--manifest", str(workspace / "run.man"), "--out", str(workspace / "out")])


class TestDecode:
    def test_writes_one_file_per_paragraph(self, workspace):
        assert run(workspace, "decode") == 0
        assert (workspace / "out" / "p1.txt").read_text() == "ab\na\n"
        assert (workspace / "out" / "p2.txt").read_text() == "a\n"

    def test_greedy_decoder_flag(self, workspace):
        assert run(workspace, "decode", "--decoder", "greedy") == 0
        assert (workspace / "out" / "p1.txt").read_text() == "b\na\n"

    def test_beam_width_flag_changes_decoding(self, workspace):
        (workspace / "base.txt").write_text("ab b\n")
        write_ctcm(workspace / "l1.ctcm", np.array([[0.4, 0.35, 0.0, 0.25], [0.0, 0.9, 0.0, 0.1]]))
        assert run(workspace, "decode", "--beam-width", "1") == 0
        assert (workspace / "out" / "p1.txt").read_text().splitlines()[0] == "ab"
        assert run(workspace, "decode") == 0
        assert (workspace / "out" / "p1.txt").read_text().splitlines()[0] == "b"

    def test_bad_paragraph_reported_not_fatal(self, workspace, capsys):
        (workspace / "run.man").write_text(
            "ctcman 1\n"
            "alphabet = alphabet.txt\n"
            "word_chars = ab\n"
            "corpus = base base.txt\n"
            "line = good l1.ctcm\n"
            "line = bad broken.ctcm\n"
        )
        write_ctcm(workspace / "broken.ctcm", np.array([[0.9, 0.0, 0.0, 0.0]]))
        assert run(workspace, "decode") == 0
        assert (workspace / "out" / "good.txt").exists()
        assert not (workspace / "out" / "bad.txt").exists()
        err = capsys.readouterr().err
        assert "bad" in err and "sums to" in err

    def test_missing_manifest_is_input_error(self, workspace, capsys):
        code = main(
            ["decode", "--manifest", str(workspace / "none.man"), "--out", str(workspace / "out")]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_matrix_file_is_input_error(self, workspace, capsys):
        (workspace / "l1.ctcm").write_text("ctcm 1\nT=1 C=3 kind=prob\n0.5 x 0 0\n")
        assert run(workspace, "decode") == 2
        assert "byte" in capsys.readouterr().err

    def test_seed_flag_accepted(self, workspace):
        assert run(workspace, "decode", "--seed", "7") == 0


class TestEval:
    def test_writes_report_and_summary(self, workspace):
        assert run(workspace, "eval") == 0
        report = (workspace / "out" / "report.csv").read_text()
        assert report == (
            "variant,decoder,cer_percent,wer_percent,char_edits,char_total,"
            "word_edits,word_total\n"
            "base,greedy,25.00,33.33,1,4,1,3\n"
            "base,wbs,0.00,0.00,0,4,0,3\n"
        )
        summary = (workspace / "out" / "summary.txt").read_text()
        assert "beam_width = 50" in summary
        assert "[base] words = 1" in summary
        assert "improvement: CER = 100.00, WER = 100.00" in summary

    def test_beam_width_echoed(self, workspace):
        assert run(workspace, "eval", "--beam-width", "9") == 0
        assert "beam_width = 9" in (workspace / "out" / "summary.txt").read_text()

    def test_missing_ground_truth_fails(self, workspace):
        (workspace / "run.man").write_text(
            "ctcman 1\n"
            "alphabet = alphabet.txt\n"
            "word_chars = ab\n"
            "corpus = base base.txt\n"
            "line = p1 l1.ctcm\n"
        )
        assert run(workspace, "eval") == 2

    def test_deterministic_across_runs_and_jobs(self, workspace):
        assert run(workspace, "eval") == 0
        first = (workspace / "out" / "report.csv").read_bytes()
        assert run(workspace, "eval", "--jobs", "3") == 0
        assert (workspace / "out" / "report.csv").read_bytes() == first


class TestCompare:
    def test_compare_table(self, workspace, capsys):
        assert run(workspace, "compare") == 0
        table = (workspace / "out" / "compare.csv").read_text()
        assert table == (
            "metric,greedy,wbs,improvement_percent\n"
            "CER,25.00,0.00,100.00\n"
            "WER,33.33,0.00,100.00\n"
        )
        assert capsys.readouterr().out.strip().splitlines()[-1] == "WER,33.33,0.00,100.00"


class TestCorpusExperiment:
    def test_variant_table(self, workspace):
        assert run(workspace, "corpus-exp") == 0
        table = (workspace / "out" / "corpus_experiment.csv").read_text()
        lines = table.splitlines()
        assert lines[0] == "variant,corpus_words,cer_percent,wer_percent"
        assert lines[1].startswith("base,1,")
        assert lines[2].startswith("wide,3,")
        assert (workspace / "out" / "report.csv").exists()

    def test_requires_second_corpus(self, workspace, capsys):
        (workspace / "run.man").write_text(
            "ctcman 1\n"
            "alphabet = alphabet.txt\n"
            "word_chars = ab\n"
            "corpus = base base.txt\n"
            "line = p1 l1.ctcm l1.gt\n"
        )
        assert run(workspace, "corpus-exp") == 2
        assert "at least 2" in capsys.readouterr().err


class TestManifestOptions:
    def test_manifest_beam_width_used_when_flag_absent(self, workspace):
        manifest = (workspace / "run.man").read_text()
        (workspace / "run.man").write_text(manifest + "beam_width = 7\n")
        assert run(workspace, "eval") == 0
        assert "beam_width = 7" in (workspace / "out" / "summary.txt").read_text()
        assert run(workspace, "eval", "--beam-width", "11") == 0
        assert "beam_width = 11" in (workspace / "out" / "summary.txt").read_text()


class TestErrorMapping:
    def test_cap_exceeded_maps_to_exit_3(self, workspace, monkeypatch, capsys):
        from lexidecode import cli

        def boom(self, payload):
            raise ServiceError(400, "cap_exceeded", "too many paths")

        monkeypatch.setattr(cli.ServiceClient, "run_eval", boom)
        assert run(workspace, "eval") == 3
        assert "cap_exceeded" in capsys.readouterr().err

    def test_service_validation_maps_to_exit_2(self, workspace, monkeypatch):
        from lexidecode import cli

        def boom(self, payload):
            raise ServiceError(400, "invalid_input", "nope")

        monkeypatch.setattr(cli.ServiceClient, "run_eval", boom)
        assert run(workspace, "eval") == 2

    def test_log_env_accepted(self, workspace, monkeypatch):
        monkeypatch.setenv("LEXIDECODE_LOG", "DEBUG")
        assert run(workspace, "decode") == 0
