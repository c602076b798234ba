"""Corpus ingestion, vocabularies, subsampling and frequency statistics.

Corpus files are UTF-8 text with LF line endings, one sentence per line:
``<year><TAB><lemma>( <lemma>)*``. Tokens are taken verbatim; the input is
expected to be pre-lemmatized, so no case folding or normalization happens
here.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import FormatError, NumericalError, ParameterError

log = logging.getLogger(__name__)

Sentence = tuple[int, tuple[str, ...]]


class TokenizedCorpus:
    """Time-stamped tokenized sentences for one period.

    Immutable after construction. ``token_total`` is the number of tokens
    over all sentences and is the denominator for normalized frequencies.
    """

    def __init__(
        self,
        period_label: str,
        year_range: tuple[int, int],
        sentences: Iterable[tuple[int, Sequence[str]]],
    ):
        lo, hi = int(year_range[0]), int(year_range[1])
        if lo > hi:
            raise ParameterError(f"year range {year_range} is empty")
        self.period_label = period_label
        self.year_range = (lo, hi)
        cleaned = []
        counts: Counter[str] = Counter()
        total = 0
        for year, tokens in sentences:
            tokens = tuple(tokens)
            if not tokens:
                raise ParameterError("sentence with zero tokens")
            if not lo <= year <= hi:
                raise ParameterError(
                    f"sentence year {year} outside period range {self.year_range}"
                )
            cleaned.append((year, tokens))
            counts.update(tokens)
            total += len(tokens)
        self.sentences: tuple[Sentence, ...] = tuple(cleaned)
        self.token_total = total
        self._counts = counts

    def __len__(self) -> int:
        return len(self.sentences)

    def count(self, word: str) -> int:
        """Raw number of occurrences of ``word``; 0 when absent."""
        return self._counts.get(word, 0)

    def iter_tokens(self):
        for _, tokens in self.sentences:
            yield from tokens

    def filter_years(self, year_range: tuple[int, int]) -> "TokenizedCorpus":
        """Restrict to sentences whose year lies in the intersection of
        ``year_range`` and the corpus's own range."""
        lo = max(self.year_range[0], int(year_range[0]))
        hi = min(self.year_range[1], int(year_range[1]))
        if lo > hi:
            raise ParameterError(
                f"{year_range} does not intersect period range {self.year_range}"
            )
        kept = [(y, t) for y, t in self.sentences if lo <= y <= hi]
        return TokenizedCorpus(self.period_label, (lo, hi), kept)

    def __repr__(self):
        return (
            f"TokenizedCorpus({self.period_label!r}, years={self.year_range}, "
            f"sentences={len(self.sentences)}, tokens={self.token_total})"
        )


class Vocabulary:
    """Dense word<->id map with raw counts.

    Ids run 0..V-1 in descending count order, ties broken lexicographically,
    so they are a deterministic function of the corpus token multiset.
    ``total_tokens`` is the pre-filtering corpus token total.
    """

    def __init__(self, items: Sequence[tuple[str, int]], min_count: int, total_tokens: int):
        self.id_to_word: tuple[str, ...] = tuple(w for w, _ in items)
        self.word_to_id: dict[str, int] = {w: i for i, w in enumerate(self.id_to_word)}
        self.counts = np.array([c for _, c in items], dtype=np.int64)
        self.min_count = min_count
        self.total_tokens = total_tokens

    def __len__(self) -> int:
        return len(self.id_to_word)

    def __contains__(self, word: str) -> bool:
        return word in self.word_to_id

    def count(self, word: str) -> int:
        i = self.word_to_id.get(word)
        return 0 if i is None else int(self.counts[i])


def load_corpus(path, year_range: tuple[int, int], period_label: str) -> TokenizedCorpus:
    """Read a corpus file, keeping sentences whose year falls in the
    inclusive ``year_range``.

    Out-of-range sentences are skipped silently (one physical file may hold
    several periods). Lines with a year but no tokens are skipped with a
    warning. A line without a tab or with a non-integer year raises
    :class:`FormatError` naming the line number.
    """
    sentences = []
    lo, hi = int(year_range[0]), int(year_range[1])
    with open(path, encoding="utf-8") as handle:
        try:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if line.endswith("\r"):
                    line = line[:-1]
                if not line:
                    continue
                year_field, sep, rest = line.partition("\t")
                if not sep:
                    raise FormatError(f"{path}: line {lineno}: no tab separator")
                try:
                    year = int(year_field)
                except ValueError:
                    raise FormatError(
                        f"{path}: line {lineno}: year {year_field!r} is not an integer"
                    ) from None
                tokens = rest.split()
                if not tokens:
                    log.warning("%s: line %d: year but no tokens, skipped", path, lineno)
                    continue
                if lo <= year <= hi:
                    sentences.append((year, tokens))
        except UnicodeDecodeError as exc:
            raise FormatError(f"{path}: not valid UTF-8: {exc}") from exc
    return TokenizedCorpus(period_label, (lo, hi), sentences)


def load_targets(path) -> tuple[str, ...]:
    """Read a target-word file: one word per line, duplicates rejected."""
    words = []
    seen = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            word = line.strip()
            if not word:
                continue
            if word in seen:
                raise FormatError(f"{path}: line {lineno}: duplicate target {word!r}")
            seen.add(word)
            words.append(word)
    return tuple(words)


def build_vocabulary(corpus: TokenizedCorpus, min_count: int = 1) -> Vocabulary:
    """Retain exactly the words with raw count >= ``min_count``."""
    if min_count < 1:
        raise ParameterError(f"min_count must be >= 1, got {min_count}")
    items = [(w, c) for w, c in corpus._counts.items() if c >= min_count]
    items.sort(key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary(items, min_count, corpus.token_total)


def subsample(
    corpus: TokenizedCorpus,
    vocab: Vocabulary,
    threshold: float | None,
    seed: int,
) -> TokenizedCorpus:
    """Randomly thin frequent words, word2vec style.

    A token of word ``w`` with relative frequency ``f > threshold`` is kept
    with probability ``sqrt(threshold / f)``, independently per occurrence.
    ``threshold=None`` returns the corpus unchanged. Deterministic for a
    fixed seed.
    """
    if threshold is None:
        return corpus
    if not 0.0 < threshold < 1.0:
        raise ParameterError(f"subsampling threshold must lie in (0, 1), got {threshold}")
    if vocab.total_tokens != corpus.token_total:
        raise ParameterError(
            "vocabulary was not built from this corpus "
            f"(token totals {vocab.total_tokens} != {corpus.token_total})"
        )
    total = corpus.token_total
    rng = np.random.default_rng(seed)
    kept_sentences = []
    for year, tokens in corpus.sentences:
        kept = []
        for tok in tokens:
            f = corpus._counts[tok] / total
            # only frequent words consume randomness, so thinning rare words
            # out of the vocabulary does not shift the stream
            if f > threshold and rng.random() >= np.sqrt(threshold / f):
                continue
            kept.append(tok)
        if kept:
            kept_sentences.append((year, kept))
    return TokenizedCorpus(corpus.period_label, corpus.year_range, kept_sentences)


def normalized_frequency(corpus: TokenizedCorpus, word: str) -> float:
    """Raw count divided by the corpus token total; 0 for absent words."""
    if corpus.token_total == 0:
        raise NumericalError("normalized frequency undefined for an empty corpus")
    return corpus.count(word) / corpus.token_total
