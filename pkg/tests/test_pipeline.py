import json

import numpy as np
import pytest

from lscd import ConfigError, PipelineConfig, run_pipeline

from synthbench import build_benchmark


def small_data(tmp_path, seed=11):
    """Desk-sized corpora with a couple of clearly changed words."""
    rng = np.random.default_rng(seed)
    home_ctx = ["Haus", "Dach", "Garten", "Tur"]
    tech_ctx = ["Draht", "Strom", "Funke", "Spule"]
    food_ctx = ["Brot", "Mehl", "Ofen", "Korn"]

    def sentence(center, ctx):
        words = [ctx[int(i)] for i in rng.integers(0, len(ctx), size=5)]
        pos = int(rng.integers(0, 6))
        return words[:pos] + [center] + words[pos:]

    lines_a, lines_b = [], []
    for _ in range(60):
        lines_a.append((1760, sentence("Leiter", home_ctx)))
        lines_b.append((1860, sentence("Leiter", food_ctx)))  # changed word
        lines_a.append((1765, sentence("Draht", tech_ctx)))
        lines_b.append((1865, sentence("Draht", tech_ctx)))
        lines_a.append((1770, sentence("Brot", food_ctx)))
        lines_b.append((1870, sentence("Brot", food_ctx)))  # stable word
        lines_a.append((1780, sentence("Garten", home_ctx)))
        lines_b.append((1880, sentence("Garten", home_ctx)))
    corpus_a = tmp_path / "a.txt"
    corpus_b = tmp_path / "b.txt"
    corpus_a.write_text(
        "".join(f"{y}\t{' '.join(t)}\n" for y, t in lines_a), encoding="utf-8"
    )
    corpus_b.write_text(
        "".join(f"{y}\t{' '.join(t)}\n" for y, t in lines_b), encoding="utf-8"
    )
    targets = tmp_path / "targets.txt"
    targets.write_text("Leiter\nBrot\nGarten\n", encoding="utf-8")
    gold = tmp_path / "gold.tsv"
    gold.write_text("Leiter\t1.0\nBrot\t0.2\nGarten\t0.1\n", encoding="utf-8")
    return corpus_a, corpus_b, targets, gold


def config_for(tmp_path, out_name, **overrides):
    corpus_a, corpus_b, targets, gold = small_data(tmp_path)
    values = {
        "corpus_a.path": str(corpus_a),
        "corpus_a.year_from": 1750,
        "corpus_a.year_to": 1799,
        "corpus_b.path": str(corpus_b),
        "corpus_b.year_from": 1850,
        "corpus_b.year_to": 1899,
        "targets.path": str(targets),
        "gold.path": str(gold),
        "space.kind": "count",
        "space.window": 4,
        "space.dimension": 12,
        "space.epochs": 2,
        "align.method": "ci",
        "measure.kind": "cd",
        "seed": 3,
        "output.dir": str(tmp_path / out_name),
    }
    values.update(overrides)
    return PipelineConfig(values)


PIPELINES = [
    {"space.kind": "count", "align.method": "ci", "measure.kind": "cd"},
    {"space.kind": "ppmi", "align.method": "ci", "measure.kind": "cd"},
    {"space.kind": "ppmi", "align.method": "ci", "measure.kind": "jsd"},
    {"space.kind": "ppmi", "align.method": "ci", "measure.kind": "cd",
     "space.tfidf_top_n": 6},
    {"space.kind": "ppmi", "align.method": "wi", "measure.kind": "cd"},
    {"space.kind": "count", "align.method": "ci", "measure.kind": "cd",
     "binarize": True},
    {"space.kind": "count", "align.method": "none", "measure.kind": "fd"},
    {"space.kind": "sgns", "align.method": "op", "measure.kind": "cd"},
    {"space.kind": "sgns", "align.method": "op", "measure.kind": "jsd",
     "align.noise_aware": True},
    {"space.kind": "sgns", "align.method": "vi", "measure.kind": "cd",
     "align.vi_mode": "full_model"},
    {"space.kind": "sgns", "align.method": "knn", "measure.kind": "cd",
     "align.knn_k": 4},
    {"space.kind": "count", "align.method": "ci", "measure.kind": "cd",
     "subsample.threshold": 0.05},
]


@pytest.mark.parametrize("arch", PIPELINES)
def test_pipeline_runs_and_finds_the_changed_word(arch, tmp_path):
    name = "-".join(f"{v}" for v in arch.values())
    cfg = config_for(tmp_path, f"run_{name}", **arch)
    result = run_pipeline(cfg)
    assert result.ranking_path.exists()
    assert result.manifest_path.exists()
    assert set(result.ranking.words()) == {"Leiter", "Brot", "Garten"}
    if arch["measure.kind"] != "fd" and "subsample.threshold" not in arch:
        # the context-swapped word must outrank the stable ones
        assert result.ranking.words()[0] == "Leiter"
        assert result.report is not None and result.report.rho > 0


def test_identical_config_and_seed_reproduce_ranking_bytes(tmp_path):
    cfg_one = config_for(tmp_path, "det1", **{"space.kind": "sgns",
                                              "align.method": "op",
                                              "measure.kind": "cd"})
    cfg_two = config_for(tmp_path, "det2", **{"space.kind": "sgns",
                                              "align.method": "op",
                                              "measure.kind": "cd"})
    one = run_pipeline(cfg_one)
    two = run_pipeline(cfg_two)
    assert one.ranking_path.read_bytes() == two.ranking_path.read_bytes()


def test_rerun_from_manifest_config_matches(tmp_path):
    cfg = config_for(tmp_path, "audit1")
    result = run_pipeline(cfg)
    manifest = json.loads(result.manifest_path.read_text(encoding="utf-8"))
    replay_cfg_path = tmp_path / "replay.cfg"
    replay_cfg_path.write_text(manifest["config_text"], encoding="utf-8")
    replay = PipelineConfig.from_file(replay_cfg_path)
    replay.set_raw("output.dir", str(tmp_path / "audit2"))
    replayed = run_pipeline(replay)
    assert replayed.ranking_path.read_bytes() == result.ranking_path.read_bytes()


def test_manifest_records_inputs_and_timings(tmp_path):
    cfg = config_for(tmp_path, "manifest")
    result = run_pipeline(cfg)
    manifest = json.loads(result.manifest_path.read_text(encoding="utf-8"))
    assert set(manifest["input_checksums"]) == {
        "corpus_a.path", "corpus_b.path", "targets.path", "gold.path"
    }
    assert all(len(v) == 64 for v in manifest["input_checksums"].values())
    assert "measure" in manifest["stage_seconds"]
    assert manifest["system"] == {"space": "count", "alignment": "ci", "measure": "cd"}


def test_invalid_config_fails_before_any_work(tmp_path):
    cfg = config_for(tmp_path, "invalid", **{"space.kind": "sgns",
                                             "align.method": "ci"})
    with pytest.raises(ConfigError, match="context columns"):
        run_pipeline(cfg)
    assert not (tmp_path / "invalid" / "ranking.tsv").exists()


def test_missing_corpus_file_is_os_error(tmp_path):
    cfg = config_for(tmp_path, "missing")
    cfg.set_raw("corpus_a.path", str(tmp_path / "nowhere.txt"))
    with pytest.raises(OSError):
        run_pipeline(cfg)


def test_workers_do_not_change_count_ranking(tmp_path):
    one = run_pipeline(config_for(tmp_path, "w1", **{"workers": 1}))
    four = run_pipeline(config_for(tmp_path, "w4", **{"workers": 4}))
    assert one.ranking_path.read_bytes() == four.ranking_path.read_bytes()


def test_benchmark_corpora_flow_through_pipeline(tmp_path):
    """End-to-end sanity on the synthetic benchmark at reduced cost."""
    bench = build_benchmark(tmp_path / "bench")
    cfg = PipelineConfig({
        "corpus_a.path": str(bench.corpus_a),
        "corpus_a.year_from": 1750,
        "corpus_a.year_to": 1799,
        "corpus_b.path": str(bench.corpus_b),
        "corpus_b.year_from": 1850,
        "corpus_b.year_to": 1899,
        "targets.path": str(bench.targets_path),
        "gold.path": str(bench.gold_path),
        "gold.orientation": "change",
        "space.kind": "count",
        "space.window": 10,
        "align.method": "ci",
        "measure.kind": "cd",
        "seed": 42,
        "output.dir": str(tmp_path / "bench_run"),
    })
    result = run_pipeline(cfg)
    assert result.report.rho > 0.95
