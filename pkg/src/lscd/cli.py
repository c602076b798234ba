"""Command-line interface.

Subcommands: ingest, train, align, measure, evaluate, pipeline,
leaderboard. Every subcommand accepts ``--config FILE`` plus one flag per
config key (``--space.window 10``); flags override file values.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import align as align_mod
from . import sgns as sgns_mod
from .config import SCHEMA, PipelineConfig, validate_config
from .corpus import build_vocabulary, load_corpus, load_targets, subsample
from .errors import ConfigError, LscdError
from .evaluation import EvalReport, SystemInfo, leaderboard, load_gold, spearman
from .measures import ChangeRanking, rank_targets
from .pipeline import build_space, run_pipeline
from .spaces import VectorSpace, binarize

log = logging.getLogger("lscd")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="config file (key = value lines)")
    group = parser.add_argument_group("config keys (override file values)")
    for key, entry in SCHEMA.items():
        group.add_argument(f"--{key}", dest=key, metavar="V", help=entry.help)


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    for key in SCHEMA:
        raw = vars(args).get(key)
        if raw is not None:
            cfg.set_raw(key, raw)
    return cfg


def _period_flag(parser):
    parser.add_argument(
        "--period", choices=("a", "b"), default="a",
        help="which configured corpus to use (default a)",
    )


def _prepared(cfg, side):
    years = (cfg[f"corpus_{side}.year_from"], cfg[f"corpus_{side}.year_to"])
    if cfg[f"corpus_{side}.path"] is None or None in years:
        raise ConfigError(f"corpus_{side}.path and year range are required")
    corpus = load_corpus(cfg[f"corpus_{side}.path"], years, cfg[f"corpus_{side}.label"])
    vocab = build_vocabulary(corpus, cfg["vocab.min_count"])
    if cfg["subsample.threshold"] is not None:
        corpus = subsample(corpus, vocab, cfg["subsample.threshold"], cfg["seed"])
        vocab = build_vocabulary(corpus, cfg["vocab.min_count"])
    return corpus, vocab


def _out_dir(cfg) -> Path:
    out = Path(cfg["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(cfg)
    stats = {}
    for side in ("a", "b"):
        if cfg[f"corpus_{side}.path"] is None:
            continue
        corpus, vocab = _prepared(cfg, side)
        stats[side] = {
            "path": cfg[f"corpus_{side}.path"],
            "period": corpus.period_label,
            "sentences": len(corpus.sentences),
            "tokens": corpus.token_total,
            "vocabulary": len(vocab),
        }
        vocab_path = out / f"vocab_{side}.tsv"
        with open(vocab_path, "w", encoding="utf-8") as handle:
            for word in vocab.id_to_word:
                handle.write(f"{word}\t{vocab.count(word)}\n")
        log.info("period %s: %s", side, stats[side])
    if not stats:
        raise ConfigError("no corpus configured; set corpus_a.path at least")
    (out / "corpus_stats.json").write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(stats, indent=2))
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args)
    if cfg["space.kind"] is None:
        raise ConfigError("space.kind is required")
    corpus, vocab = _prepared(cfg, args.period)
    space = build_space(cfg, corpus, vocab)
    if cfg["binarize"]:
        space = binarize(space, cfg["binarize.threshold"])
    out = _out_dir(cfg) / f"space_{args.period}.txt"
    space.save(out)
    log.info("wrote %s (%d words, %d dims, kind %s)", out, len(space), space.dims, space.space_kind)
    print(out)
    return 0


def cmd_align(args) -> int:
    cfg = _load_config(args)
    method = cfg["align.method"]
    if method is None:
        raise ConfigError("align.method is required")
    out = _out_dir(cfg)
    if method in ("ci", "op"):
        if not args.space_a or not args.space_b:
            raise ConfigError(f"align.method={method} needs --space-a and --space-b files")
        a = VectorSpace.load(args.space_a)
        b = VectorSpace.load(args.space_b)
        if method == "ci":
            pair = align_mod.column_intersection(a, b)
        else:
            opts = align_mod.OpOptions(
                mean_center=cfg["align.mean_center"],
                length_normalize=cfg["align.length_normalize"],
                anchor_policy=cfg["align.anchor_policy"],
                anchor_top_n=cfg["align.anchor_top_n"],
                anchor_word_path=cfg["align.anchor_word_path"],
                noise_aware=cfg["align.noise_aware"],
                noise_drop_fraction=cfg["align.noise_drop_fraction"],
                noise_max_rounds=cfg["align.noise_max_rounds"],
            )
            if cfg["align.anchor_policy"] == "top_frequency":
                raise ConfigError(
                    "top_frequency anchors need corpus counts; run the 'pipeline' "
                    "subcommand for that policy"
                )
            pair = align_mod.orthogonal_procrustes(a, b, opts)
    elif method == "vi":
        if not args.space_a:
            raise ConfigError("align.method=vi needs --space-a (the period-a sgns model)")
        model_a = VectorSpace.load(args.space_a)
        corpus_b, vocab_b = _prepared(cfg, "b")
        hyper = sgns_mod.SgnsHyperparameters(
            dimension=cfg["space.dimension"],
            window=cfg["space.window"],
            negative_samples=cfg["space.negative_samples"],
            epochs=cfg["space.epochs"],
            initial_learning_rate=cfg["space.learning_rate"],
            unigram_exponent=cfg["space.unigram_exponent"],
            seed=cfg["seed"],
        )
        pair = align_mod.vector_initialization_align(
            corpus_b, model_a, vocab_b, hyper, cfg["align.vi_mode"]
        )
    elif method == "wi":
        corpus_a, _ = _prepared(cfg, "a")
        corpus_b, _ = _prepared(cfg, "b")
        targets = load_targets(cfg["targets.path"])
        merged = align_mod.word_injection_merge(
            corpus_a, corpus_b, targets, mark=cfg["align.wi_mark"]
        )
        vocab_m = build_vocabulary(merged, cfg["vocab.min_count"])
        space = build_space(cfg, merged, vocab_m)
        if cfg["binarize"]:
            space = binarize(space, cfg["binarize.threshold"])
        pair = align_mod.word_injection_pair(space, targets)
    elif method in ("knn", "none"):
        log.info("align.method=%s needs no matrix alignment; nothing to do", method)
        return 0
    else:  # pragma: no cover - schema limits choices
        raise ConfigError(f"unsupported align.method {method!r}")
    path_a, path_b = out / "aligned_a.txt", out / "aligned_b.txt"
    pair.space_a.save(path_a)
    pair.space_b.save(path_b)
    log.info("wrote %s and %s (%d shared rows)", path_a, path_b, len(pair.shared_rows))
    print(path_a)
    print(path_b)
    return 0


def cmd_measure(args) -> int:
    cfg = _load_config(args)
    if cfg["measure.kind"] is None:
        raise ConfigError("measure.kind is required")
    targets = load_targets(cfg["targets.path"])
    measure = cfg["measure.kind"]
    if measure == "fd":
        corpus_a, _ = _prepared(cfg, "a")
        corpus_b, _ = _prepared(cfg, "b")
        ranking = rank_targets(targets, measure="fd", corpus_a=corpus_a, corpus_b=corpus_b)
    else:
        if not args.space_a or not args.space_b:
            raise ConfigError("measure needs --space-a and --space-b files")
        a = VectorSpace.load(args.space_a)
        b = VectorSpace.load(args.space_b)
        if cfg["align.method"] == "knn":
            ranking = rank_targets(
                targets, measure="knn-cd", space_a=a, space_b=b, knn_k=cfg["align.knn_k"]
            )
        else:
            shared = tuple(sorted(set(a.row_index) & set(b.row_index)))
            pair = align_mod.AlignedPair(a, b, shared, "file")
            ranking = rank_targets(
                targets, measure=measure, pair=pair,
                negative_strategy=cfg["measure.negative_strategy"],
            )
    out = _out_dir(cfg) / "ranking.tsv"
    ranking.save(out)
    log.info("wrote %s (%d targets, %d flagged)", out, len(ranking.entries), len(ranking.flagged))
    print(out)
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    if not cfg["gold.path"]:
        raise ConfigError("gold.path is required for evaluation")
    gold = load_gold(cfg["gold.path"], cfg["gold.orientation"])
    ranking = ChangeRanking.load(args.ranking)
    report = spearman(ranking, gold)
    out = _out_dir(cfg) / "report.json"
    payload = {"rho": report.rho, "n": report.n, "missing_words": sorted(report.missing_words)}
    out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(payload, indent=2))
    return 0


def cmd_pipeline(args) -> int:
    cfg = _load_config(args)
    result = run_pipeline(cfg)
    print(result.ranking_path)
    if result.report is not None:
        print(f"spearman rho = {result.report.rho:.3f} (n = {result.report.n})")
    return 0


def cmd_leaderboard(args) -> int:
    cfg = _load_config(args)
    if not cfg["gold.path"]:
        raise ConfigError("gold.path is required for a leaderboard")
    gold = load_gold(cfg["gold.path"], cfg["gold.orientation"])
    reports: dict[str, EvalReport] = {}
    systems: dict[str, SystemInfo] = {}
    for path in args.rankings:
        path = Path(path)
        name = path.parent.name if path.name == "ranking.tsv" else path.stem
        reports[name] = spearman(ChangeRanking.load(path), gold)
        manifest = path.parent / "manifest.json"
        if manifest.exists():
            meta = json.loads(manifest.read_text(encoding="utf-8")).get("system", {})
            systems[name] = SystemInfo(
                space=meta.get("space", ""),
                alignment=meta.get("alignment", ""),
                measure=meta.get("measure", ""),
            )
    board = leaderboard(reports, systems)
    out = _out_dir(cfg)
    (out / "leaderboard.txt").write_text(board.to_text(), encoding="utf-8")
    (out / "leaderboard.tsv").write_text(board.to_tsv(), encoding="utf-8")
    print(board.to_text(), end="")
    return 0


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    issues = validate_config(cfg)
    for issue in issues:
        print(issue)
    if issues:
        raise ConfigError(f"{len(issues)} violation(s)")
    print("configuration ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lscd",
        description="Detect and rank lexical semantic change between two diachronic corpora.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    commands = [
        ("ingest", cmd_ingest, "load corpora, report statistics, dump vocabularies"),
        ("train", cmd_train, "build one period's vector space and save it"),
        ("align", cmd_align, "align two saved spaces (or train/merge for vi/wi)"),
        ("measure", cmd_measure, "score targets from saved spaces or corpora"),
        ("evaluate", cmd_evaluate, "Spearman's rho of a ranking against the gold"),
        ("pipeline", cmd_pipeline, "run the full experiment end to end"),
        ("leaderboard", cmd_leaderboard, "rank several submissions against the gold"),
        ("validate", cmd_validate, "check a configuration without running it"),
    ]
    for name, fn, help_text in commands:
        cmd = sub.add_parser(name, help=help_text)
        _add_config_flags(cmd)
        cmd.set_defaults(fn=fn)
        if name == "train":
            _period_flag(cmd)
        if name in ("align", "measure"):
            cmd.add_argument("--space-a", metavar="FILE", help="saved space for period a")
            cmd.add_argument("--space-b", metavar="FILE", help="saved space for period b")
        if name == "evaluate":
            cmd.add_argument("--ranking", metavar="FILE", required=True, help="ranking TSV")
        if name == "leaderboard":
            cmd.add_argument("rankings", nargs="+", metavar="RANKING", help="ranking TSVs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except LscdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
