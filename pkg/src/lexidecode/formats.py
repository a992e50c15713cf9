"""On-disk formats.

Matrix file (``.ctcm``, UTF-8 text)::

    ctcm 1
    T=<frames> C=<alphabet size> kind=<prob|logit>
    <T lines of C+1 decimal floats separated by single spaces>

Column C is the blank.  Floats are written with ``repr`` (shortest decimal
that round-trips binary64 exactly), so write/read is value-exact.

Alphabet file: a single UTF-8 line listing the C characters in column
order; the blank column is implicit and last.

Corpus file: UTF-8 plain text, tokenized with the run's word characters.

Manifest (line-oriented UTF-8 key-value)::

    ctcman 1
    alphabet = alphabet.txt
    word_chars = <word characters, verbatim>
    corpus = <variant-name> <path>     # repeatable, first is the bound corpus
    beam_width = 50                    # optional
    require_complete_words = false     # optional
    log_space = false                  # optional
    line = <paragraph-id> <matrix.ctcm> [<ground-truth.txt>]

Relative paths resolve against the manifest's directory.  Fields are
space-separated, so paths and paragraph ids must not contain spaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ctc import Alphabet
from .errors import InputError

MATRIX_KINDS = ("prob", "logit")


def write_ctcm(path: str | Path, frames: np.ndarray, kind: str = "prob") -> None:
    if kind not in MATRIX_KINDS:
        raise InputError(f"matrix kind must be one of {MATRIX_KINDS}, got {kind!r}")
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise InputError("matrix must be two-dimensional")
    t, cols = frames.shape
    lines = [f"ctcm 1\nT={t} C={cols - 1} kind={kind}\n"]
    for row in frames:
        lines.append(" ".join(repr(float(x)) for x in row) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")


def _ctcm_error(path: Path, offset: int, message: str) -> InputError:
    return InputError(f"{path}: byte {offset}: {message}")


def read_ctcm(path: str | Path) -> tuple[np.ndarray, str]:
    """Parse a .ctcm file into (frames, kind).  Parse failures report the
    byte offset of the offending token."""
    path = Path(path)
    raw = path.read_bytes()
    lines: list[tuple[int, bytes]] = []
    start = 0
    chunks = raw.split(b"\n")
    if chunks and chunks[-1] == b"":  # trailing newline is not an extra line
        chunks.pop()
    for chunk in chunks:
        lines.append((start, chunk))
        start += len(chunk) + 1

    def line_at(i: int) -> tuple[int, bytes]:
        if i >= len(lines):
            raise _ctcm_error(path, len(raw), f"unexpected end of file, wanted line {i + 1}")
        return lines[i]

    offset, header = line_at(0)
    if header != b"ctcm 1":
        raise _ctcm_error(path, offset, f"bad header {header[:20]!r}, expected 'ctcm 1'")

    offset, meta = line_at(1)
    fields = meta.split(b" ")
    if len(fields) != 3:
        raise _ctcm_error(path, offset, "metadata line must be 'T=<int> C=<int> kind=<prob|logit>'")
    values: dict[str, str] = {}
    cursor = offset
    for field in fields:
        try:
            key, _, value = field.decode("utf-8").partition("=")
        except UnicodeDecodeError:
            raise _ctcm_error(path, cursor, "metadata is not UTF-8")
        values[key] = value
        cursor += len(field) + 1
    try:
        t = int(values.get("T", ""))
        c = int(values.get("C", ""))
    except ValueError:
        raise _ctcm_error(path, offset, f"bad T/C in metadata {meta!r}")
    kind = values.get("kind", "")
    if kind not in MATRIX_KINDS or t < 0 or c < 0:
        raise _ctcm_error(path, offset, f"bad metadata {meta!r}")

    frames = np.zeros((t, c + 1), dtype=np.float64)
    for i in range(t):
        offset, data = line_at(2 + i)
        tokens = data.split(b" ")
        if len(tokens) != c + 1:
            raise _ctcm_error(
                path, offset, f"row {i} has {len(tokens)} values, expected {c + 1}"
            )
        cursor = offset
        for j, token in enumerate(tokens):
            try:
                frames[i, j] = float(token)
            except ValueError:
                raise _ctcm_error(path, cursor, f"bad float {token[:20]!r}")
            cursor += len(token) + 1
    return frames, kind


def read_alphabet(path: str | Path) -> Alphabet:
    text = Path(path).read_text(encoding="utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    if text.endswith("\r"):
        text = text[:-1]
    if not text:
        raise InputError(f"{path}: alphabet file is empty")
    if "\n" in text or "\r" in text:
        raise InputError(f"{path}: alphabet must be a single line")
    return Alphabet(text)


def write_alphabet(path: str | Path, alphabet: Alphabet) -> None:
    Path(path).write_text(alphabet.chars + "\n", encoding="utf-8", newline="\n")


def read_corpus_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def read_ground_truth(path: str | Path) -> str:
    text = Path(path).read_text(encoding="utf-8")
    if text.endswith("\n"):
        text = text[:-1]
    return text


@dataclass(frozen=True)
class ManifestEntry:
    paragraph_id: str
    matrix_path: Path
    ground_truth_path: Path | None


@dataclass(frozen=True)
class Manifest:
    alphabet_path: Path
    word_chars: str
    corpora: tuple[tuple[str, Path], ...]
    entries: tuple[ManifestEntry, ...]
    beam_width: int | None = None
    require_complete_words: bool = False
    log_space: bool = False


def _parse_bool(value: str, where: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise InputError(f"{where}: expected true or false, got {value!r}")


def parse_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    base = path.parent
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}")

    alphabet_path: Path | None = None
    word_chars: str | None = None
    corpora: list[tuple[str, Path]] = []
    entries: list[ManifestEntry] = []
    beam_width: int | None = None
    require_complete = False
    log_space = False
    saw_header = False

    for lineno, line in enumerate(raw.split("\n"), start=1):
        where = f"{path}:{lineno}"
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not saw_header:
            if stripped != "ctcman 1":
                raise InputError(f"{where}: manifest must start with 'ctcman 1'")
            saw_header = True
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise InputError(f"{where}: expected 'key = value'")
        key = key.strip()
        value = value.lstrip()
        if key == "alphabet":
            alphabet_path = base / value
        elif key == "word_chars":
            word_chars = value
        elif key == "corpus":
            name, _, rel = value.partition(" ")
            if not name or not rel:
                raise InputError(f"{where}: corpus needs '<name> <path>'")
            corpora.append((name, base / rel))
        elif key == "beam_width":
            try:
                beam_width = int(value)
            except ValueError:
                raise InputError(f"{where}: bad beam_width {value!r}")
        elif key == "require_complete_words":
            require_complete = _parse_bool(value, where)
        elif key == "log_space":
            log_space = _parse_bool(value, where)
        elif key == "line":
            fields = value.split(" ")
            if len(fields) not in (2, 3):
                raise InputError(f"{where}: line needs '<id> <matrix> [<ground truth>]'")
            gt = base / fields[2] if len(fields) == 3 else None
            entries.append(ManifestEntry(fields[0], base / fields[1], gt))
        else:
            raise InputError(f"{where}: unknown key {key!r}")

    if not saw_header:
        raise InputError(f"{path}: empty manifest (missing 'ctcman 1' header)")
    if alphabet_path is None:
        raise InputError(f"{path}: manifest is missing 'alphabet'")
    if word_chars is None or not word_chars:
        raise InputError(f"{path}: manifest is missing 'word_chars'")
    if not corpora:
        raise InputError(f"{path}: manifest names no corpus")

    manifest = Manifest(
        alphabet_path=alphabet_path,
        word_chars=word_chars,
        corpora=tuple(corpora),
        entries=tuple(entries),
        beam_width=beam_width,
        require_complete_words=require_complete,
        log_space=log_space,
    )
    for ref in [manifest.alphabet_path, *(p for _, p in manifest.corpora)]:
        if not ref.is_file():
            raise InputError(f"{path}: referenced file does not exist: {ref}")
    for entry in manifest.entries:
        if not entry.matrix_path.is_file():
            raise InputError(f"{path}: referenced file does not exist: {entry.matrix_path}")
        if entry.ground_truth_path is not None and not entry.ground_truth_path.is_file():
            raise InputError(
                f"{path}: referenced file does not exist: {entry.ground_truth_path}"
            )
    return manifest
