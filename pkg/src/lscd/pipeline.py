"""Config-driven experiment runs: corpus -> space -> alignment -> measure -> eval.

A run writes three files into ``output.dir``: ``ranking.tsv`` (the scored
targets), ``report.json`` (when a gold file is configured) and
``manifest.json`` (resolved config, input checksums, stage timings,
backend). Identical config and seed reproduce the ranking byte for byte
with ``workers = 1``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from . import align as align_mod
from . import sgns as sgns_mod
from .config import PipelineConfig, validate_config
from .corpus import TokenizedCorpus, Vocabulary, build_vocabulary, load_corpus, load_targets, subsample
from .errors import ConfigError
from .evaluation import EvalReport, load_gold, spearman
from .measures import ChangeRanking, rank_targets
from .spaces import (
    VectorSpace,
    apply_context_selection,
    binarize,
    build_count_matrix,
    ppmi_transform,
    tfidf_select_contexts,
)

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    ranking: ChangeRanking
    report: EvalReport | None
    output_dir: Path
    ranking_path: Path
    report_path: Path | None
    manifest_path: Path


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class _Stages:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, name, fn):
        start = time.perf_counter()
        result = fn()
        self.timings[name] = round(time.perf_counter() - start, 6)
        log.info("stage %s: %.3fs", name, self.timings[name])
        return result


def _hyper(cfg: PipelineConfig) -> sgns_mod.SgnsHyperparameters:
    return sgns_mod.SgnsHyperparameters(
        dimension=cfg["space.dimension"],
        window=cfg["space.window"],
        negative_samples=cfg["space.negative_samples"],
        epochs=cfg["space.epochs"],
        initial_learning_rate=cfg["space.learning_rate"],
        unigram_exponent=cfg["space.unigram_exponent"],
        seed=cfg["seed"],
    )


def _op_options(cfg: PipelineConfig) -> align_mod.OpOptions:
    return align_mod.OpOptions(
        mean_center=cfg["align.mean_center"],
        length_normalize=cfg["align.length_normalize"],
        anchor_policy=cfg["align.anchor_policy"],
        anchor_top_n=cfg["align.anchor_top_n"],
        anchor_word_path=cfg["align.anchor_word_path"],
        noise_aware=cfg["align.noise_aware"],
        noise_drop_fraction=cfg["align.noise_drop_fraction"],
        noise_max_rounds=cfg["align.noise_max_rounds"],
    )


def build_space(
    cfg: PipelineConfig, corpus: TokenizedCorpus, vocab: Vocabulary
) -> VectorSpace:
    """One period space per the ``space.*`` keys (without binarization)."""
    kind = cfg["space.kind"]
    if kind == "sgns":
        return sgns_mod.train_sgns(
            corpus, vocab, _hyper(cfg), shuffle_sentences=cfg["space.shuffle_sentences"]
        )
    space = build_count_matrix(corpus, vocab, cfg["space.window"], workers=cfg["workers"])
    if kind == "ppmi":
        top_n = cfg["space.tfidf_top_n"]
        if top_n is not None:
            selection = tfidf_select_contexts(corpus, vocab, top_n)
            space = apply_context_selection(space, selection)
        space = ppmi_transform(space, cfg["space.shift_k"], cfg["space.smoothing"])
    return space


def _maybe_binarize(cfg: PipelineConfig, space: VectorSpace) -> VectorSpace:
    if cfg["binarize"]:
        return binarize(space, cfg["binarize.threshold"])
    return space


def _load_period(cfg: PipelineConfig, side: str) -> TokenizedCorpus:
    years = (cfg[f"corpus_{side}.year_from"], cfg[f"corpus_{side}.year_to"])
    return load_corpus(cfg[f"corpus_{side}.path"], years, cfg[f"corpus_{side}.label"])


def _prepare_corpus(cfg: PipelineConfig, corpus: TokenizedCorpus):
    """Vocabulary + optional subsampling; the vocabulary is rebuilt after
    thinning so its counts describe the corpus the spaces actually see."""
    vocab = build_vocabulary(corpus, cfg["vocab.min_count"])
    threshold = cfg["subsample.threshold"]
    if threshold is not None:
        corpus = subsample(corpus, vocab, threshold, cfg["seed"])
        vocab = build_vocabulary(corpus, cfg["vocab.min_count"])
    return corpus, vocab


def run_pipeline(cfg: PipelineConfig) -> RunResult:
    violations = validate_config(cfg)
    if violations:
        raise ConfigError("invalid configuration: " + "; ".join(violations))

    stages = _Stages()
    out_dir = Path(cfg["output.dir"])
    out_dir.mkdir(parents=True, exist_ok=True)

    checksums = {}
    for key in ("corpus_a.path", "corpus_b.path", "targets.path", "gold.path"):
        if cfg[key]:
            checksums[key] = _sha256(cfg[key])

    corpus_a = stages.run("load_corpus_a", lambda: _load_period(cfg, "a"))
    corpus_b = stages.run("load_corpus_b", lambda: _load_period(cfg, "b"))
    targets = load_targets(cfg["targets.path"])

    measure = cfg["measure.kind"]
    method = cfg["align.method"]
    extra: dict = {}

    if measure == "fd":
        ranking = stages.run(
            "measure",
            lambda: rank_targets(
                targets, measure="fd", corpus_a=corpus_a, corpus_b=corpus_b
            ),
        )
    else:
        if method == "wi":
            def build_joint():
                prep_a, vocab_a = _prepare_corpus(cfg, corpus_a)
                prep_b, vocab_b = _prepare_corpus(cfg, corpus_b)
                merged = align_mod.word_injection_merge(
                    prep_a, prep_b, targets, mark=cfg["align.wi_mark"]
                )
                vocab_m = build_vocabulary(merged, cfg["vocab.min_count"])
                space = _maybe_binarize(cfg, build_space(cfg, merged, vocab_m))
                return align_mod.word_injection_pair(space, targets)

            pair = stages.run("align", build_joint)
            ranking = stages.run(
                "measure",
                lambda: rank_targets(
                    targets, measure=measure, pair=pair,
                    negative_strategy=cfg["measure.negative_strategy"],
                ),
            )
        else:
            corpus_a2, vocab_a = stages.run("prepare_a", lambda: _prepare_corpus(cfg, corpus_a))
            corpus_b2, vocab_b = stages.run("prepare_b", lambda: _prepare_corpus(cfg, corpus_b))
            # vi trains period b from the raw period-a model; binarization then
            # applies to both trained spaces, not to the initialization
            space_a = stages.run(
                "space_a",
                lambda: build_space(cfg, corpus_a2, vocab_a)
                if method == "vi"
                else _maybe_binarize(cfg, build_space(cfg, corpus_a2, vocab_a)),
            )

            if method == "vi":
                pair = stages.run(
                    "align",
                    lambda: align_mod.vector_initialization_align(
                        corpus_b2, space_a, vocab_b, _hyper(cfg), cfg["align.vi_mode"],
                        shuffle_sentences=cfg["space.shuffle_sentences"],
                    ),
                )
                if cfg["binarize"]:
                    pair = align_mod.AlignedPair(
                        binarize(pair.space_a, cfg["binarize.threshold"]),
                        binarize(pair.space_b, cfg["binarize.threshold"]),
                        pair.shared_rows, pair.method_tag, pair.report,
                    )
            else:
                space_b = stages.run("space_b", lambda: _maybe_binarize(cfg, build_space(cfg, corpus_b2, vocab_b)))
                if method == "ci":
                    pair = stages.run("align", lambda: align_mod.column_intersection(space_a, space_b))
                elif method == "op":
                    pair = stages.run(
                        "align",
                        lambda: align_mod.orthogonal_procrustes(
                            space_a, space_b, _op_options(cfg),
                            vocab_a=vocab_a, vocab_b=vocab_b,
                        ),
                    )
                elif method == "knn":
                    pair = None
                    extra["knn_spaces"] = (space_a, space_b)
                else:
                    raise ConfigError(f"unsupported align.method {method!r}")
                if pair is not None and pair.report:
                    extra["alignment_report"] = pair.report

            if method == "knn":
                space_a_, space_b_ = extra["knn_spaces"]
                ranking = stages.run(
                    "measure",
                    lambda: rank_targets(
                        targets, measure="knn-cd", space_a=space_a_, space_b=space_b_,
                        knn_k=cfg["align.knn_k"],
                    ),
                )
            else:
                ranking = stages.run(
                    "measure",
                    lambda: rank_targets(
                        targets, measure=measure, pair=pair,
                        negative_strategy=cfg["measure.negative_strategy"],
                    ),
                )

    ranking_path = out_dir / "ranking.tsv"
    ranking.save(ranking_path)

    report = None
    report_path = None
    if cfg["gold.path"]:
        gold = load_gold(cfg["gold.path"], cfg["gold.orientation"])
        report = stages.run("evaluate", lambda: spearman(ranking, gold))
        report_path = out_dir / "report.json"
        report_path.write_text(
            json.dumps(
                {
                    "rho": report.rho,
                    "n": report.n,
                    "missing_words": sorted(report.missing_words),
                },
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        log.info("spearman rho = %.3f over %d words", report.rho, report.n)

    from lscd import __version__

    manifest = {
        "version": __version__,
        "sgns_backend": sgns_mod.default_backend(),
        "config_text": cfg.to_text(),
        "system": {
            "space": cfg["space.kind"] or "",
            "alignment": cfg["align.method"] or "",
            "measure": cfg["measure.kind"] or "",
        },
        "input_checksums": checksums,
        "stage_seconds": stages.timings,
        "flagged_targets": sorted(ranking.flagged),
        "outputs": {
            "ranking": ranking_path.name,
            "report": report_path.name if report_path else None,
        },
    }
    if "alignment_report" in extra:
        manifest["alignment_report"] = extra["alignment_report"]
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    return RunResult(ranking, report, out_dir, ranking_path, report_path, manifest_path)
