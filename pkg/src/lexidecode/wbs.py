"""Word beam search: lexicon-constrained CTC beam search.

Beams carry their probability mass split into paths ending in blank and
paths ending in the last character, the standard bookkeeping that lets
duplicate texts merge exactly.  A beam is in "word" state while its
trailing run of word characters is non-empty; word-state beams may only
grow along prefix-tree edges, so every completed run in a beam's text is a
corpus word.  Mode is "words": all dictionary words are equally likely and
no n-gram scores are applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .ctc import Alphabet, ProbMatrix, _check_matrix_alphabet, labeling_probability
from .errors import CapExceededError, InputError
from .lexicon import PrefixTree, WordCharSet

LOG_ZERO = float("-inf")


@dataclass(frozen=True)
class DecodeConfig:
    beam_width: int = 50
    mode: str = "words"
    require_complete_words: bool = False
    log_space: bool = False

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise InputError("beam_width must be at least 1")
        if self.mode != "words":
            raise InputError(f"unsupported decode mode {self.mode!r}")


@dataclass
class Beam:
    """One transcription candidate: its text, split probability mass, and
    the trailing maximal run of word characters."""

    text: str
    p_blank: float
    p_non_blank: float
    current_prefix: str = ""

    @property
    def score(self) -> float:
        return self.p_blank + self.p_non_blank

    @property
    def in_word_state(self) -> bool:
        return self.current_prefix != ""


def _non_word_chars(alphabet: Alphabet, word_chars: WordCharSet) -> frozenset[str]:
    return frozenset(ch for ch in alphabet.chars if ch not in word_chars)


def allowed_extensions(
    beam: Beam, tree: PrefixTree, word_chars: WordCharSet, alphabet: Alphabet
) -> frozenset[str]:
    """Characters this beam may be extended with.

    Word-state beams follow prefix-tree edges; once the trailing prefix is
    itself a complete word, non-word characters may additionally close it.
    Non-word-state beams (including the empty beam) may start any corpus
    word or append any non-word character.
    """
    prefix = beam.current_prefix
    tree_chars = tree.next_chars(prefix)
    if prefix == "" or tree.is_word(prefix):
        return tree_chars | _non_word_chars(alphabet, word_chars)
    return tree_chars


class _Entry:
    """Mutable per-text accumulator used while advancing one frame."""

    __slots__ = ("p_blank", "p_non_blank", "prefix", "node")

    def __init__(self, p_blank: float, p_non_blank: float, prefix: str, node) -> None:
        self.p_blank = p_blank
        self.p_non_blank = p_non_blank
        self.prefix = prefix
        self.node = node


def _advance_frame(
    beams: list[tuple[str, _Entry]],
    row: list[float],
    tree: PrefixTree,
    non_word: frozenset[str],
    alphabet: Alphabet,
    log_space: bool,
) -> dict[str, _Entry]:
    """One beam-search step: copy and extend every beam, merging duplicate
    texts by probability summation.  Associative and commutative in the
    beam order up to floating-point rounding."""
    blank_idx = alphabet.blank_index
    zero = LOG_ZERO if log_space else 0.0
    add = np.logaddexp if log_space else lambda a, b: a + b
    mul = (lambda a, b: a + b) if log_space else (lambda a, b: a * b)

    if log_space:
        row = [math.log(p) if p > 0.0 else LOG_ZERO for p in row]

    nxt: dict[str, _Entry] = {}

    def bump(text: str, p_blank: float, p_non_blank: float, prefix: str, node) -> None:
        entry = nxt.get(text)
        if entry is None:
            nxt[text] = _Entry(p_blank, p_non_blank, prefix, node)
        else:
            entry.p_blank = add(entry.p_blank, p_blank)
            entry.p_non_blank = add(entry.p_non_blank, p_non_blank)

    for text, entry in beams:
        total = add(entry.p_blank, entry.p_non_blank)

        # Copy: either stay silent (blank) or repeat the last character.
        p_blank = mul(total, row[blank_idx])
        p_non_blank = zero
        if text:
            p_non_blank = mul(entry.p_non_blank, row[alphabet.index_of(text[-1])])
        bump(text, p_blank, p_non_blank, entry.prefix, entry.node)

        # Extend along tree edges, plus non-word characters where allowed.
        node = entry.node
        chars: Iterable[str] = node.children
        if entry.prefix == "" or node.is_word:
            chars = set(chars) | non_word
        for ch in sorted(chars):
            if ch in non_word:
                new_prefix, new_node = "", tree.root
            else:
                new_prefix, new_node = entry.prefix + ch, node.children[ch]
            col = row[alphabet.index_of(ch)]
            if text and text[-1] == ch:
                mass = mul(entry.p_blank, col)
            else:
                mass = mul(total, col)
            bump(text + ch, zero, mass, new_prefix, new_node)

    return nxt


def _entry_total(entry: _Entry, log_space: bool) -> float:
    if log_space:
        return float(np.logaddexp(entry.p_blank, entry.p_non_blank))
    return entry.p_blank + entry.p_non_blank


def wbs_search(
    m: ProbMatrix,
    tree: PrefixTree,
    word_chars: WordCharSet,
    alphabet: Alphabet,
    config: DecodeConfig = DecodeConfig(),
) -> list[Beam]:
    """Run the beam search over all frames and return the surviving beams,
    best first (ties broken toward the lexicographically smaller text).

    In log-space mode the returned probabilities are exponentiated, so they
    are comparable but not bit-identical to linear-space scores.
    """
    _check_matrix_alphabet(m, alphabet)
    log_space = config.log_space
    zero = LOG_ZERO if log_space else 0.0
    one = 0.0 if log_space else 1.0
    non_word = _non_word_chars(alphabet, word_chars)

    beams: dict[str, _Entry] = {"": _Entry(one, zero, "", tree.root)}
    frames = m.frames
    for t in range(m.frame_count):
        row = [float(x) for x in frames[t]]
        ordered = sorted(beams.items())
        merged = _advance_frame(ordered, row, tree, non_word, alphabet, log_space)
        ranked = sorted(
            merged.items(), key=lambda kv: (-_entry_total(kv[1], log_space), kv[0])
        )
        beams = dict(ranked[: config.beam_width])

    final = sorted(beams.items(), key=lambda kv: (-_entry_total(kv[1], log_space), kv[0]))
    out = []
    for text, entry in final:
        p_b, p_nb = entry.p_blank, entry.p_non_blank
        if log_space:
            p_b, p_nb = math.exp(p_b), math.exp(p_nb)
        out.append(Beam(text, p_b, p_nb, entry.prefix))
    return out


def _prefix_is_closed(beam: Beam, tree: PrefixTree) -> bool:
    return beam.current_prefix == "" or tree.is_word(beam.current_prefix)


def select_beam(
    beams: list[Beam], tree: PrefixTree, config: DecodeConfig = DecodeConfig()
) -> Beam:
    """Pick the result among ranked beams.  With ``require_complete_words``
    the best beam whose trailing prefix is empty or a complete word is
    preferred, falling back to the overall best."""
    if config.require_complete_words:
        for beam in beams:
            if _prefix_is_closed(beam, tree):
                return beam
    return beams[0]


def wbs_decode(
    m: ProbMatrix,
    tree: PrefixTree,
    word_chars: WordCharSet,
    alphabet: Alphabet,
    config: DecodeConfig = DecodeConfig(),
) -> str:
    """Decode to the selected beam's text."""
    beams = wbs_search(m, tree, word_chars, alphabet, config)
    return select_beam(beams, tree, config).text


def legal_labelings(
    tree: PrefixTree,
    word_chars: WordCharSet,
    alphabet: Alphabet,
    max_length: int,
    require_complete_words: bool = False,
) -> list[str]:
    """Every labeling of length <= max_length whose completed word-character
    runs are corpus words and whose trailing run is a corpus-word prefix
    (a complete word, when ``require_complete_words``).  Sorted."""
    non_word = sorted(_non_word_chars(alphabet, word_chars))
    results: list[str] = []
    # Stack holds (text, tree node of the trailing prefix, prefix is empty).
    stack: list[tuple[str, object, bool]] = [("", tree.root, True)]
    while stack:
        text, node, prefix_empty = stack.pop()
        if prefix_empty or node.is_word or not require_complete_words:
            results.append(text)
        if len(text) == max_length:
            continue
        if prefix_empty or node.is_word:
            for ch in non_word:
                stack.append((text + ch, tree.root, True))
        for ch, child in node.children.items():
            stack.append((text + ch, child, False))
    results.sort()
    return results


def exhaustive_lexicon_decode(
    m: ProbMatrix,
    tree: PrefixTree,
    word_chars: WordCharSet,
    alphabet: Alphabet,
    max_cost: int = 2_000_000,
) -> tuple[str, float]:
    """Oracle decoder: score every lexicon-legal labeling of length <= T
    with the exact forward algorithm and return the argmax (ties toward the
    lexicographically smallest text).

    Refuses when the summed forward-DP cost, roughly T * (2*len+1) per
    labeling, exceeds ``max_cost``.
    """
    _check_matrix_alphabet(m, alphabet)
    t_count = m.frame_count
    candidates = legal_labelings(tree, word_chars, alphabet, t_count)
    cost = sum(t_count * (2 * len(text) + 1) for text in candidates)
    if cost > max_cost:
        raise CapExceededError(
            f"scoring {len(candidates)} legal labelings costs {cost}, cap is {max_cost}"
        )
    best_text = ""
    best_p = -1.0
    for text in candidates:
        p = labeling_probability(m, text, alphabet)
        if p > best_p:
            best_text, best_p = text, p
    return best_text, best_p
