"""Pipeline configuration.

Config files are flat, diff-friendly text: one ``key = value`` per line
with section prefixes (``space.window = 10``), ``#`` comments and blank
lines allowed. Every key can also be given on the command line as
``--<key> <value>``; flags override file values. ``none`` clears an
optional value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Callable

from .errors import ConfigError

OUTPUT_DIR_ENV = "LSCD_OUTPUT_DIR"


def _bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    def inner(raw: str):
        if raw.lower() in ("none", ""):
            return None
        return parse(raw)

    return inner


def _choice(*options: str) -> Callable[[str], str]:
    def inner(raw: str) -> str:
        lowered = raw.lower()
        if lowered not in options:
            raise ValueError(f"must be one of {', '.join(options)}; got {raw!r}")
        return lowered

    return inner


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Any
    help: str


def _default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, "runs")


SCHEMA: dict[str, Key] = {
    "corpus_a.path": Key(str, None, "corpus file for the earlier period"),
    "corpus_a.year_from": Key(int, None, "first year of period a (inclusive)"),
    "corpus_a.year_to": Key(int, None, "last year of period a (inclusive)"),
    "corpus_a.label": Key(str, "t1", "label for period a"),
    "corpus_b.path": Key(str, None, "corpus file for the later period"),
    "corpus_b.year_from": Key(int, None, "first year of period b (inclusive)"),
    "corpus_b.year_to": Key(int, None, "last year of period b (inclusive)"),
    "corpus_b.label": Key(str, "t2", "label for period b"),
    "targets.path": Key(str, None, "target word file, one word per line"),
    "gold.path": Key(_optional(str), None, "gold ranking TSV for evaluation"),
    "gold.orientation": Key(
        _choice("change", "relatedness"), "change",
        "whether higher gold values mean more change or more relatedness",
    ),
    "vocab.min_count": Key(int, 1, "minimum raw count for vocabulary words"),
    "subsample.threshold": Key(
        _optional(float), None, "frequent-word subsampling threshold; none disables"
    ),
    "space.kind": Key(_choice("count", "ppmi", "sgns"), None, "vector space type"),
    "space.window": Key(int, 10, "co-occurrence / skip-gram window size"),
    "space.shift_k": Key(float, 1.0, "ppmi shift constant k (>= 1)"),
    "space.smoothing": Key(float, 0.75, "ppmi context-distribution smoothing in (0, 1]"),
    "space.tfidf_top_n": Key(
        _optional(int), None, "keep only each word's top-n tf-idf contexts before ppmi"
    ),
    "space.dimension": Key(int, 100, "sgns embedding dimension"),
    "space.negative_samples": Key(int, 1, "sgns negatives per pair"),
    "space.epochs": Key(int, 5, "sgns training epochs"),
    "space.learning_rate": Key(float, 0.025, "sgns initial learning rate"),
    "space.unigram_exponent": Key(float, 0.75, "negative-sampling distribution exponent"),
    "space.shuffle_sentences": Key(_bool, False, "shuffle sentence order per epoch"),
    "align.method": Key(_choice("ci", "op", "vi", "wi", "knn", "none"), None, "alignment"),
    "align.mean_center": Key(_bool, True, "mean-center anchor rows before the OP fit"),
    "align.length_normalize": Key(_bool, True, "length-normalize anchor rows before the OP fit"),
    "align.anchor_policy": Key(
        _choice("all_shared", "top_frequency", "word_list"), "all_shared", "OP anchor choice"
    ),
    "align.anchor_top_n": Key(int, 5000, "anchor count for top_frequency"),
    "align.anchor_word_path": Key(_optional(str), None, "anchor word list for word_list"),
    "align.noise_aware": Key(_bool, False, "iteratively drop high-residual anchors"),
    "align.noise_drop_fraction": Key(float, 0.15, "fraction of anchors dropped per round"),
    "align.noise_max_rounds": Key(int, 5, "maximum trimming rounds"),
    "align.vi_mode": Key(
        _choice("word_only", "full_model"), "word_only",
        "initialize period b from the word matrix only or the full model",
    ),
    "align.knn_k": Key(int, 10, "neighborhood size for knn second-order vectors"),
    "align.wi_mark": Key(_choice("a", "b"), "b", "which corpus gets marked target tokens"),
    "measure.kind": Key(_choice("cd", "jsd", "fd"), None, "change measure"),
    "measure.negative_strategy": Key(
        _choice("clip", "shift", "abs"), "clip", "negative-value handling for jsd"
    ),
    "binarize": Key(_bool, False, "binarize matrices before measuring"),
    "binarize.threshold": Key(
        _choice("column_mean", "zero"), "column_mean", "binarization threshold rule"
    ),
    "seed": Key(int, 1, "seed for every stochastic stage"),
    "workers": Key(int, 1, "stage-internal parallelism; 1 is the deterministic reference"),
    "output.dir": Key(str, None, f"run output directory (default ${OUTPUT_DIR_ENV} or 'runs')"),
}


class PipelineConfig:
    """Typed view over the flat config key space."""

    def __init__(self, values: dict[str, Any] | None = None):
        self._values: dict[str, Any] = {k: key.default for k, key in SCHEMA.items()}
        self._values["output.dir"] = _default_output_dir()
        if values:
            for key, value in values.items():
                if key not in SCHEMA:
                    raise ConfigError(f"unknown config key {key!r}")
                self._values[key] = value

    def __getitem__(self, key: str) -> Any:
        return self._values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self._values.get(key, default)

    def set_raw(self, key: str, raw: str) -> None:
        """Apply one textual ``key = value`` assignment."""
        entry = SCHEMA.get(key)
        if entry is None:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            self._values[key] = entry.parse(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None

    def override(self, assignments: dict[str, str]) -> None:
        for key, raw in assignments.items():
            self.set_raw(key, raw)

    def to_text(self) -> str:
        """Canonical resolved config as key = value lines."""
        lines = []
        for key in SCHEMA:
            value = self._values[key]
            if value is None:
                value = "none"
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        cfg = cls()
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, raw = line.partition("=")
                if not sep:
                    raise ConfigError(f"{path}: line {lineno}: expected key = value")
                try:
                    cfg.set_raw(key.strip(), raw)
                except ConfigError as exc:
                    raise ConfigError(f"{path}: line {lineno}: {exc}") from None
        return cfg


def validate_config(cfg: PipelineConfig) -> list[str]:
    """Compatibility violations; empty iff the config can run.

    Each violation names the offending field (pair)."""
    issues: list[str] = []

    for key in ("corpus_a.path", "corpus_a.year_from", "corpus_a.year_to",
                "corpus_b.path", "corpus_b.year_from", "corpus_b.year_to",
                "targets.path", "space.kind", "align.method", "measure.kind"):
        if cfg[key] is None:
            issues.append(f"{key} is required")

    space = cfg["space.kind"]
    align = cfg["align.method"]
    measure = cfg["measure.kind"]

    if measure == "fd" and align not in (None, "none"):
        issues.append(
            f"measure.kind=fd requires align.method=none "
            f"(frequency difference is corpus-level), got align.method={align}"
        )
    if measure in ("cd", "jsd") and align == "none":
        issues.append(
            f"measure.kind={measure} requires a vector-producing alignment, "
            "but align.method=none"
        )
    if align == "ci" and space == "sgns":
        issues.append(
            "align.method=ci requires space.kind in (count, ppmi): "
            "column intersection needs explicit context columns"
        )
    if align == "wi" and space == "sgns":
        issues.append("align.method=wi requires a count or ppmi space")
    if align in ("op", "vi") and space in ("count", "ppmi"):
        issues.append(f"align.method={align} requires space.kind=sgns")

    for corpus in ("corpus_a", "corpus_b"):
        lo, hi = cfg[f"{corpus}.year_from"], cfg[f"{corpus}.year_to"]
        if lo is not None and hi is not None and lo > hi:
            issues.append(f"{corpus}.year_from={lo} exceeds {corpus}.year_to={hi}")

    positive = [
        ("vocab.min_count", 1), ("space.window", 1), ("space.dimension", 1),
        ("space.negative_samples", 1), ("align.anchor_top_n", 1),
        ("align.knn_k", 1), ("align.noise_max_rounds", 1), ("workers", 1),
    ]
    for key, floor in positive:
        if cfg[key] < floor:
            issues.append(f"{key} must be >= {floor}, got {cfg[key]}")
    if cfg["space.epochs"] < 0:
        issues.append(f"space.epochs must be >= 0, got {cfg['space.epochs']}")
    if cfg["space.learning_rate"] <= 0:
        issues.append("space.learning_rate must be positive")
    if cfg["space.shift_k"] < 1.0:
        issues.append(f"space.shift_k must be >= 1, got {cfg['space.shift_k']}")
    if not 0.0 < cfg["space.smoothing"] <= 1.0:
        issues.append(f"space.smoothing must lie in (0, 1], got {cfg['space.smoothing']}")
    top_n = cfg["space.tfidf_top_n"]
    if top_n is not None and top_n < 1:
        issues.append(f"space.tfidf_top_n must be >= 1, got {top_n}")
    threshold = cfg["subsample.threshold"]
    if threshold is not None and not 0.0 < threshold < 1.0:
        issues.append(f"subsample.threshold must lie in (0, 1), got {threshold}")
    if cfg["align.noise_aware"] and not 0.0 < cfg["align.noise_drop_fraction"] < 0.5:
        issues.append(
            "align.noise_drop_fraction must lie in (0, 0.5), "
            f"got {cfg['align.noise_drop_fraction']}"
        )
    if cfg["align.anchor_policy"] == "word_list" and not cfg["align.anchor_word_path"]:
        issues.append("align.anchor_policy=word_list requires align.anchor_word_path")
    return issues
