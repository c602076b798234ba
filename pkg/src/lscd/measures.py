"""Per-word degree-of-change scores and rankings.

Scores are oriented so that higher always means more change. Unresolvable
targets (missing rows, zero vectors) are ranked as maximally changed and
flagged rather than failing the whole ranking.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .align import AlignedPair, knn_local_neighborhood
from .corpus import TokenizedCorpus
from .errors import (
    DegenerateDistributionError,
    FormatError,
    MissingWordError,
    NumericalError,
    ParameterError,
    UndefinedDistanceError,
)

log = logging.getLogger(__name__)

MEASURE_TAGS = ("CD", "JSD", "FD", "KNN-CD")


def cosine_distance(u, v) -> float:
    """1 minus cosine similarity, clamped into [0, 2].

    Identical vectors give exactly 0. A zero vector on either side raises
    :class:`UndefinedDistanceError`.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ParameterError(f"vector lengths differ: {u.size} vs {v.size}")
    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        raise UndefinedDistanceError("cosine distance undefined for a zero vector")
    if np.array_equal(u, v):
        return 0.0
    distance = 1.0 - float(np.dot(u, v) / (norm_u * norm_v))
    return min(2.0, max(0.0, distance))


def jensen_shannon_distance(u, v, negative_strategy: str = "clip") -> float:
    """Square root of the base-2 Jensen-Shannon divergence; range [0, 1].

    Inputs are turned into distributions first: a negative-value strategy
    (clip: ``max(x, 0)``; shift: subtract the vector's minimum when it is
    negative; abs: ``|x|``) followed by L1 normalization. A vector without
    mass after that raises :class:`DegenerateDistributionError`.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ParameterError(f"vector lengths differ: {u.size} vs {v.size}")
    if negative_strategy not in ("clip", "shift", "abs"):
        raise ParameterError(f"unknown negative strategy {negative_strategy!r}")

    def as_distribution(x):
        if negative_strategy == "clip":
            x = np.maximum(x, 0.0)
        elif negative_strategy == "shift":
            x = x - min(0.0, float(x.min()))
        else:
            x = np.abs(x)
        mass = x.sum()
        if not mass > 0:
            raise DegenerateDistributionError(
                f"vector has no probability mass after {negative_strategy!r}"
            )
        return x / mass

    p = as_distribution(u)
    q = as_distribution(v)
    m = 0.5 * (p + q)
    left = p > 0
    right = q > 0
    divergence = 0.5 * (
        float(np.sum(p[left] * np.log2(p[left] / m[left])))
        + float(np.sum(q[right] * np.log2(q[right] / m[right])))
    )
    return math.sqrt(min(1.0, max(0.0, divergence)))


def frequency_difference(corpus_a: TokenizedCorpus, corpus_b: TokenizedCorpus, word: str) -> float:
    """Absolute difference of log-transformed normalized frequencies.

    Frequencies are half-count smoothed, ``(count + 0.5) / (total + 0.5)``,
    so absent words are legal and absent-vs-absent scores 0.
    """
    if corpus_a.token_total == 0 or corpus_b.token_total == 0:
        raise ParameterError("frequency difference needs two non-empty corpora")
    f_a = (corpus_a.count(word) + 0.5) / (corpus_a.token_total + 0.5)
    f_b = (corpus_b.count(word) + 0.5) / (corpus_b.token_total + 0.5)
    return abs(math.log(f_a) - math.log(f_b))


@dataclass(frozen=True)
class ChangeRanking:
    """Target words with degree-of-change scores, higher = more change.

    Entries are sorted by score descending, ties lexicographic. ``flagged``
    lists targets that could not be scored and were ranked as maximally
    changed.
    """

    entries: tuple[tuple[str, float], ...]
    measure_tag: str
    flagged: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.measure_tag:
            raise ParameterError("measure tag must be non-empty")
        words = [w for w, _ in self.entries]
        if len(set(words)) != len(words):
            raise ParameterError("duplicate words in ranking")
        for word, score in self.entries:
            if not math.isfinite(score):
                raise ParameterError(f"non-finite score for {word!r}")
        ordered = sorted(self.entries, key=lambda e: (-e[1], e[0]))
        if list(self.entries) != ordered:
            raise ParameterError("entries are not in canonical order")

    @classmethod
    def from_scores(cls, scores: Mapping[str, float], measure_tag: str, flagged=()) -> "ChangeRanking":
        entries = tuple(sorted(scores.items(), key=lambda e: (-e[1], e[0])))
        return cls(entries, measure_tag, frozenset(flagged))

    def scores(self) -> dict[str, float]:
        return dict(self.entries)

    def words(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.entries)

    def save(self, path) -> None:
        """Write the ranking as TSV, score with 6 decimal places."""
        with open(path, "w", encoding="utf-8") as out:
            for word, score in self.entries:
                out.write(f"{word}\t{score:.6f}\n")

    @classmethod
    def load(cls, path, measure_tag: str = "file") -> "ChangeRanking":
        scores: dict[str, float] = {}
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 2:
                    raise FormatError(f"{path}: line {lineno}: expected word<TAB>score")
                word, raw = fields
                if word in scores:
                    raise FormatError(f"{path}: line {lineno}: duplicate word {word!r}")
                try:
                    scores[word] = float(raw)
                except ValueError:
                    raise FormatError(
                        f"{path}: line {lineno}: score {raw!r} is not a number"
                    ) from None
        if not scores:
            raise FormatError(f"{path}: empty ranking")
        return cls.from_scores(scores, measure_tag)


def rank_targets(
    targets,
    *,
    measure: str = "cd",
    pair: AlignedPair | None = None,
    space_a=None,
    space_b=None,
    corpus_a: TokenizedCorpus | None = None,
    corpus_b: TokenizedCorpus | None = None,
    negative_strategy: str = "clip",
    knn_k: int = 10,
) -> ChangeRanking:
    """Score every target with the chosen measure and rank descending.

    ``cd`` and ``jsd`` compare aligned rows of ``pair``; ``knn-cd`` compares
    second-order neighborhood vectors between ``space_a`` and ``space_b``
    (or the sides of ``pair``); ``fd`` compares corpus frequencies.
    Targets the measure cannot resolve are assigned the maximal observed
    score, flagged, and logged.
    """
    target_list = list(targets)
    if not target_list:
        raise ParameterError("empty target set")
    if len(set(target_list)) != len(target_list):
        raise ParameterError("duplicate targets")
    measure = measure.lower()

    if measure in ("cd", "jsd"):
        if pair is None:
            raise ParameterError(f"measure {measure!r} needs an aligned pair")
        tag = measure.upper()

        def scorer(word: str) -> float:
            if word not in pair.space_a.row_index or word not in pair.space_b.row_index:
                raise MissingWordError(f"{word!r} missing from an aligned space")
            row_a = pair.space_a.row(word)
            row_b = pair.space_b.row(word)
            if measure == "cd":
                return cosine_distance(row_a, row_b)
            return jensen_shannon_distance(row_a, row_b, negative_strategy)

    elif measure in ("knn-cd", "knn_cd", "knn"):
        if space_a is None or space_b is None:
            if pair is None:
                raise ParameterError("measure 'knn-cd' needs two spaces")
            space_a, space_b = pair.space_a, pair.space_b
        tag = "KNN-CD"

        def scorer(word: str) -> float:
            vec_a, vec_b = knn_local_neighborhood(space_a, space_b, word, knn_k)
            return cosine_distance(vec_a, vec_b)

    elif measure == "fd":
        if corpus_a is None or corpus_b is None:
            raise ParameterError("measure 'fd' needs both corpora")
        tag = "FD"

        def scorer(word: str) -> float:
            return frequency_difference(corpus_a, corpus_b, word)

    else:
        raise ParameterError(f"unknown measure {measure!r}")

    resolved: dict[str, float] = {}
    flagged: list[str] = []
    for word in target_list:
        try:
            score = float(scorer(word))
            if not math.isfinite(score):
                raise NumericalError(f"non-finite score {score!r}")
            resolved[word] = score
        except (MissingWordError, NumericalError) as exc:
            log.warning("target %r unresolvable (%s); ranked as maximally changed", word, exc)
            flagged.append(word)
    if flagged:
        ceiling = max(resolved.values()) if resolved else 0.0
        for word in flagged:
            resolved[word] = ceiling
    return ChangeRanking.from_scores(resolved, tag, frozenset(flagged))
