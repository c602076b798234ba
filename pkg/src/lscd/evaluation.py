"""Scoring predicted rankings against a gold ranking with Spearman's rho."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, FormatError, ParameterError


@dataclass(frozen=True)
class GoldRanking:
    """Gold degree-of-change scores, higher = more change.

    Relatedness-oriented files (higher = more related = less change) are
    inverted at load time so every ranking in the system points the same way.
    """

    scores: Mapping[str, float]
    source_note: str = ""

    def __post_init__(self):
        if not self.scores:
            raise ParameterError("gold ranking is empty")
        for word, value in self.scores.items():
            if not math.isfinite(value):
                raise ParameterError(f"non-finite gold score for {word!r}")


@dataclass(frozen=True)
class EvalReport:
    rho: float
    n: int
    missing_words: frozenset[str] = field(default_factory=frozenset)


def average_ranks(values) -> np.ndarray:
    """1-based ranks of ``values`` in ascending order, ties averaged."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(predicted, gold: GoldRanking) -> EvalReport:
    """Spearman's rho between a predicted ranking and the gold ranking.

    Both score lists get fractional (average) ranks for ties; rho is the
    Pearson correlation of the rank vectors over the common words. Words
    present on only one side are excluded and reported in
    ``missing_words``.
    """
    if hasattr(predicted, "entries"):
        pred_scores = dict(predicted.entries)
    else:
        pred_scores = dict(predicted)
    common = sorted(w for w in pred_scores if w in gold.scores)
    missing = frozenset(set(pred_scores) ^ set(gold.scores))
    if len(common) < 2:
        raise EvaluationError(
            f"only {len(common)} words are common to both rankings; need at least 2"
        )
    ranks_pred = average_ranks([pred_scores[w] for w in common])
    ranks_gold = average_ranks([gold.scores[w] for w in common])
    dx = ranks_pred - ranks_pred.mean()
    dy = ranks_gold - ranks_gold.mean()
    var_x = float(np.sum(dx * dx))
    var_y = float(np.sum(dy * dy))
    if var_x == 0.0 or var_y == 0.0:
        raise EvaluationError("all ranks tie on one side; correlation undefined")
    rho = float(np.sum(dx * dy)) / math.sqrt(var_x * var_y)
    return EvalReport(min(1.0, max(-1.0, rho)), len(common), missing)


def load_gold(path, orientation: str = "change") -> GoldRanking:
    """Read a gold TSV (``word<TAB>value``).

    ``orientation="relatedness"`` negates the values so that a higher stored
    score always means more change; ``"change"`` stores them verbatim.
    """
    if orientation not in ("change", "relatedness"):
        raise ParameterError(f"unknown gold orientation {orientation!r}")
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError(f"{path}: line {lineno}: expected word<TAB>value")
            word, raw = fields
            if word in scores:
                raise FormatError(f"{path}: line {lineno}: duplicate word {word!r}")
            try:
                value = float(raw)
            except ValueError:
                raise FormatError(
                    f"{path}: line {lineno}: value {raw!r} is not a number"
                ) from None
            scores[word] = -value if orientation == "relatedness" else value
    if not scores:
        raise FormatError(f"{path}: empty gold file")
    return GoldRanking(scores, f"{path} ({orientation})")


@dataclass(frozen=True)
class SystemInfo:
    """Descriptive columns for a leaderboard row."""

    space: str = ""
    alignment: str = ""
    measure: str = ""


@dataclass(frozen=True)
class Leaderboard:
    rows: tuple[tuple[str, str, str, str, float], ...]  # name, space, align, measure, rho

    HEADER = ("Name", "Space", "Align", "Measure", "Spearman")

    def to_text(self) -> str:
        cells = [self.HEADER] + [
            (name, space, align, measure, f"{rho:.3f}")
            for name, space, align, measure, rho in self.rows
        ]
        widths = [max(len(row[i]) for row in cells) for i in range(5)]
        lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
                 for row in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["\t".join(h.lower() for h in self.HEADER)]
        for name, space, align, measure, rho in self.rows:
            lines.append(f"{name}\t{space}\t{align}\t{measure}\t{rho:.3f}")
        return "\n".join(lines) + "\n"


def leaderboard(
    reports: Mapping[str, EvalReport],
    systems: Mapping[str, SystemInfo] | None = None,
) -> Leaderboard:
    """Rows sorted by rho descending, ties lexicographic by name."""
    if not reports:
        raise ParameterError("leaderboard needs at least one report")
    systems = systems or {}
    rows = []
    for name, report in reports.items():
        info = systems.get(name, SystemInfo())
        rows.append((name, info.space, info.alignment, info.measure, report.rho))
    rows.sort(key=lambda r: (-r[4], r[0]))
    return Leaderboard(tuple(rows))
