"""Command line front end.

All decoding and scoring happens in the service; the commands here only
load manifest files into request payloads and write response payloads to
disk.  Without --server the service runs in process, so no daemon is
needed for local work.

Exit codes: 0 success, 2 invalid input, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .client import ServiceClient, ServiceError
from .errors import CapExceededError, InputError
from .formats import (
    Manifest,
    parse_manifest,
    read_alphabet,
    read_corpus_text,
    read_ctcm,
    read_ground_truth,
)
from .lexicon import Corpus, WordCharSet
from .pipeline import RunReport, compare_decoders, corpus_table_csv, run_report_csv
from .service.models import RunReportResponse, run_report_from_response

log = logging.getLogger("lexidecode")


def _configure_logging() -> None:
    level = os.environ.get("LEXIDECODE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _load_paragraph_payloads(manifest: Manifest, with_ground_truth: bool) -> list[dict]:
    groups: dict[str, list[dict]] = {}
    for entry in manifest.entries:
        frames, kind = read_ctcm(entry.matrix_path)
        line: dict = {"matrix": frames.tolist(), "kind": kind}
        if with_ground_truth and entry.ground_truth_path is not None:
            line["ground_truth"] = read_ground_truth(entry.ground_truth_path)
        groups.setdefault(entry.paragraph_id, []).append(line)
    return [{"id": pid, "lines": lines} for pid, lines in groups.items()]


def _load_corpora(manifest: Manifest) -> list[dict]:
    word_chars = WordCharSet.from_string(manifest.word_chars)
    out = []
    for name, path in manifest.corpora:
        corpus = Corpus.from_text(read_corpus_text(path), word_chars, source_description=name)
        out.append({"name": name, "corpus_words": sorted(corpus.words)})
    return out


def _resolve_run_options(args: argparse.Namespace, manifest: Manifest) -> dict:
    beam_width = args.beam_width
    if beam_width is None:
        beam_width = manifest.beam_width if manifest.beam_width is not None else 50
    require_complete = args.require_complete_words
    if require_complete is None:
        require_complete = manifest.require_complete_words
    return {
        "beam_width": beam_width,
        "require_complete_words": require_complete,
        "log_space": manifest.log_space,
    }


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")
    log.info("wrote %s", path)


def _eval_payload(args: argparse.Namespace, manifest: Manifest, variants: list[dict]) -> dict:
    alphabet = read_alphabet(manifest.alphabet_path)
    payload = {
        "alphabet": alphabet.chars,
        "word_chars": manifest.word_chars,
        "variants": variants,
        "paragraphs": _load_paragraph_payloads(manifest, with_ground_truth=True),
        "jobs": args.jobs,
    }
    payload.update(_resolve_run_options(args, manifest))
    return payload


def _fetch_report(args: argparse.Namespace, manifest: Manifest, variants: list[dict]) -> RunReport:
    client = ServiceClient(args.server)
    response = client.run_eval(_eval_payload(args, manifest, variants))
    return run_report_from_response(RunReportResponse.model_validate(response))


def _fmt2(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.2f}"


def _render_summary(report: RunReport) -> str:
    lines = [
        f"beam_width = {report.beam_width}",
        f"require_complete_words = {str(report.require_complete_words).lower()}",
        f"log_space = {str(report.log_space).lower()}",
        f"lines = {report.rows[0].greedy.pair_count}",
    ]
    for row in report.rows:
        lines.append("")
        lines.append(f"[{row.variant}] words = {row.corpus_word_count}")
        lines.append(
            f"greedy: CER = {_fmt2(row.greedy.cer_percent)}, WER = {_fmt2(row.greedy.wer_percent)}"
        )
        lines.append(
            f"wbs: CER = {_fmt2(row.wbs.cer_percent)}, WER = {_fmt2(row.wbs.wer_percent)}"
        )
        lines.append(
            "improvement: CER = "
            f"{_fmt2(row.cer_improvement.improvement_percent)}, "
            f"WER = {_fmt2(row.wer_improvement.improvement_percent)}"
        )
    return "\n".join(lines) + "\n"


def cmd_decode(args: argparse.Namespace) -> int:
    manifest = parse_manifest(args.manifest)
    alphabet = read_alphabet(manifest.alphabet_path)
    corpora = _load_corpora(manifest)
    payload = {
        "alphabet": alphabet.chars,
        "word_chars": manifest.word_chars,
        "corpus_words": corpora[0]["corpus_words"],
        "paragraphs": _load_paragraph_payloads(manifest, with_ground_truth=False),
        "decoder": args.decoder,
        "jobs": args.jobs,
    }
    payload.update(_resolve_run_options(args, manifest))
    if not payload["paragraphs"]:
        raise InputError(f"{args.manifest}: manifest has no 'line' entries")

    client = ServiceClient(args.server)
    response = client.run_decode(payload)
    out = _out_dir(args)
    failed = 0
    for paragraph in response["paragraphs"]:
        if paragraph.get("error") is not None:
            failed += 1
            print(f"error: paragraph {paragraph['id']}: {paragraph['error']}", file=sys.stderr)
            continue
        _write(out / f"{paragraph['id']}.txt", paragraph["text"] + "\n")
    decoded = len(response["paragraphs"]) - failed
    print(f"decoded {decoded} paragraph(s) to {out}" + (f", {failed} failed" if failed else ""))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    manifest = parse_manifest(args.manifest)
    report = _fetch_report(args, manifest, _load_corpora(manifest)[:1])
    out = _out_dir(args)
    _write(out / "report.csv", run_report_csv(report))
    summary = _render_summary(report)
    _write(out / "summary.txt", summary)
    print(summary, end="")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    manifest = parse_manifest(args.manifest)
    report = _fetch_report(args, manifest, _load_corpora(manifest)[:1])
    out = _out_dir(args)
    lines = compare_decoders(report)
    _write(out / "compare.csv", "\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return 0


def cmd_corpus_exp(args: argparse.Namespace) -> int:
    manifest = parse_manifest(args.manifest)
    variants = _load_corpora(manifest)
    if len(variants) < 2:
        raise InputError(
            f"{args.manifest}: corpus experiment needs at least 2 'corpus' entries, "
            f"found {len(variants)}"
        )
    report = _fetch_report(args, manifest, variants)
    out = _out_dir(args)
    _write(out / "corpus_experiment.csv", corpus_table_csv(report))
    _write(out / "report.csv", run_report_csv(report))
    print(corpus_table_csv(report), end="")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--manifest", required=True, help="run manifest file")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument(
        "--beam-width", type=int, default=None, help="beam width (default: manifest value or 50)"
    )
    sub.add_argument(
        "--require-complete-words",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="prefer beams ending on a word boundary",
    )
    sub.add_argument("--jobs", type=int, default=1, help="worker threads for line decoding")
    sub.add_argument(
        "--seed",
        type=int,
        default=None,
        help="accepted for interface stability; decoding is deterministic and ignores it",
    )
    sub.add_argument(
        "--server",
        default=None,
        help="base URL of a running service (default: run the service in process)",
    )


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="lexidecode",
        description="Lexicon-constrained CTC decoding, evaluation, and serving.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("decode", help="decode a run manifest to one text file per paragraph")
    _add_run_flags(sub)
    sub.add_argument(
        "--decoder", choices=("wbs", "greedy"), default="wbs", help="decoder to apply"
    )
    sub.set_defaults(func=cmd_decode)

    sub = commands.add_parser("eval", help="score greedy vs lexicon decoding against ground truth")
    _add_run_flags(sub)
    sub.set_defaults(func=cmd_eval)

    sub = commands.add_parser("compare", help="write the greedy vs lexicon comparison table")
    _add_run_flags(sub)
    sub.set_defaults(func=cmd_compare)

    sub = commands.add_parser(
        "corpus-exp", help="evaluate every corpus variant in the manifest"
    )
    _add_run_flags(sub)
    sub.set_defaults(func=cmd_corpus_exp)

    sub = commands.add_parser("serve", help="run the HTTP service")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=8077)
    sub.set_defaults(func=cmd_serve)

    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = parse_args(argv)
    try:
        return args.func(args)
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if exc.kind == "cap_exceeded" else 2
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
