"""Corpus ingestion and the prefix tree that constrains beam extension.

Characters are split into "word characters" and everything else.  Tokens
are maximal runs of word characters; all other characters act purely as
separators.  Matching is case-sensitive and words are stored verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

from .errors import InputError

if TYPE_CHECKING:
    from .ctc import Alphabet


@dataclass(frozen=True)
class WordCharSet:
    """The characters that may appear inside a word."""

    members: frozenset[str]

    def __post_init__(self) -> None:
        if not self.members:
            raise InputError("word character set must not be empty")
        for ch in self.members:
            if len(ch) != 1:
                raise InputError(f"word character set holds non-character {ch!r}")

    @classmethod
    def from_string(cls, chars: str) -> "WordCharSet":
        return cls(frozenset(chars))

    @classmethod
    def alphabetic(cls, alphabet: "Alphabet | Iterable[str]") -> "WordCharSet":
        """Default rule: every alphabetic code point of the dataset alphabet
        is a word character (covers accented letters)."""
        chars = alphabet.chars if hasattr(alphabet, "chars") else alphabet
        return cls(frozenset(ch for ch in chars if ch.isalpha()))

    def __contains__(self, ch: str) -> bool:
        return ch in self.members


def tokenize(text: str, word_chars: WordCharSet) -> list[str]:
    """Split ``text`` into maximal runs of word characters, in order."""
    tokens: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch in word_chars:
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


@dataclass(frozen=True)
class Corpus:
    """A set of distinct words over some word character set."""

    words: frozenset[str]
    source_description: str = ""

    @property
    def word_count(self) -> int:
        return len(self.words)

    @classmethod
    def from_words(
        cls, words: Iterable[str], word_chars: WordCharSet, source_description: str = ""
    ) -> "Corpus":
        collected = frozenset(words)
        for word in collected:
            if not word:
                raise InputError("corpus words must be non-empty")
            for ch in word:
                if ch not in word_chars:
                    raise InputError(
                        f"corpus word {word!r} contains non-word character {ch!r}"
                    )
        return cls(collected, source_description)

    @classmethod
    def from_text(
        cls, text: str, word_chars: WordCharSet, source_description: str = ""
    ) -> "Corpus":
        """Tokenize free text and keep the distinct words."""
        return cls(frozenset(tokenize(text, word_chars)), source_description)

    def union(self, other: "Corpus", source_description: str = "") -> "Corpus":
        return Corpus(self.words | other.words, source_description)


class _Node:
    __slots__ = ("children", "is_word")

    def __init__(self) -> None:
        self.children: dict[str, _Node] = {}
        self.is_word = False


@dataclass
class PrefixTree:
    """Trie over the corpus words; immutable once built."""

    root: _Node = field(default_factory=_Node, repr=False)
    node_count: int = 1

    @classmethod
    def from_corpus(cls, corpus: Corpus) -> "PrefixTree":
        tree = cls()
        for word in corpus.words:
            node = tree.root
            for ch in word:
                child = node.children.get(ch)
                if child is None:
                    child = _Node()
                    node.children[ch] = child
                    tree.node_count += 1
                node = child
            node.is_word = True
        return tree

    def _walk(self, prefix: str) -> _Node | None:
        node = self.root
        for ch in prefix:
            node = node.children.get(ch)
            if node is None:
                return None
        return node

    def next_chars(self, prefix: str) -> frozenset[str]:
        """Characters c with prefix+c a prefix of some corpus word."""
        node = self._walk(prefix)
        if node is None:
            return frozenset()
        return frozenset(node.children)

    def is_word(self, s: str) -> bool:
        node = self._walk(s)
        return node is not None and node.is_word

    def contains_prefix(self, s: str) -> bool:
        """True iff ``s`` is a prefix (possibly all) of some corpus word."""
        return self._walk(s) is not None


def build_tree(corpus: Corpus) -> PrefixTree:
    return PrefixTree.from_corpus(corpus)
