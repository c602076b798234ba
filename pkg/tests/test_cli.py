import json

from lscd.cli import main

from test_pipeline import config_for


def write_config(tmp_path, out_name, **overrides):
    cfg = config_for(tmp_path, out_name, **overrides)
    path = tmp_path / f"{out_name}.cfg"
    path.write_text(cfg.to_text(), encoding="utf-8")
    return path


class TestPipelineCommand:
    def test_end_to_end(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path, "clirun")
        assert main(["pipeline", "--config", str(cfg_path)]) == 0
        out = capsys.readouterr().out
        assert "spearman rho" in out
        assert (tmp_path / "clirun" / "ranking.tsv").exists()

    def test_flag_overrides_config(self, tmp_path):
        cfg_path = write_config(tmp_path, "cliflag")
        code = main([
            "pipeline", "--config", str(cfg_path),
            "--space.kind", "ppmi",
            "--output.dir", str(tmp_path / "flagged"),
        ])
        assert code == 0
        manifest = json.loads(
            (tmp_path / "flagged" / "manifest.json").read_text(encoding="utf-8")
        )
        assert manifest["system"]["space"] == "ppmi"

    def test_validation_error_exit_code_one(self, tmp_path):
        cfg_path = write_config(tmp_path, "clibad", **{"space.kind": "sgns",
                                                       "align.method": "ci"})
        assert main(["pipeline", "--config", str(cfg_path)]) == 1

    def test_missing_file_exit_code_two(self, tmp_path):
        cfg_path = write_config(tmp_path, "cliio")
        code = main([
            "pipeline", "--config", str(cfg_path),
            "--corpus_a.path", str(tmp_path / "absent.txt"),
        ])
        assert code == 2

    def test_numerical_failure_exit_code_three(self, tmp_path):
        cfg_path = write_config(tmp_path, "clinum")
        # constant gold scores make the rank correlation undefined
        gold = tmp_path / "flat_gold.tsv"
        gold.write_text("Leiter\t1.0\nBrot\t1.0\nGarten\t1.0\n", encoding="utf-8")
        code = main([
            "pipeline", "--config", str(cfg_path),
            "--gold.path", str(gold),
            "--output.dir", str(tmp_path / "numfail"),
        ])
        assert code == 3


class TestStageCommands:
    def test_ingest(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path, "ing")
        assert main(["ingest", "--config", str(cfg_path),
                     "--output.dir", str(tmp_path / "ing_out")]) == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["a"]["tokens"] > 0
        assert (tmp_path / "ing_out" / "vocab_a.tsv").exists()

    def test_train_align_measure_evaluate_chain(self, tmp_path, capsys):
        out = tmp_path / "chain"
        cfg_path = write_config(
            tmp_path, "chain",
            **{"space.kind": "sgns", "align.method": "op", "measure.kind": "cd"},
        )
        base = ["--config", str(cfg_path), "--output.dir", str(out)]
        assert main(["train", *base, "--period", "a"]) == 0
        assert main(["train", *base, "--period", "b"]) == 0
        assert main([
            "align", *base,
            "--space-a", str(out / "space_a.txt"),
            "--space-b", str(out / "space_b.txt"),
        ]) == 0
        assert main([
            "measure", *base,
            "--space-a", str(out / "aligned_a.txt"),
            "--space-b", str(out / "aligned_b.txt"),
        ]) == 0
        assert main([
            "evaluate", *base, "--ranking", str(out / "ranking.tsv"),
        ]) == 0
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert -1.0 <= report["rho"] <= 1.0

    def test_ci_align_from_saved_spaces(self, tmp_path):
        out = tmp_path / "ci_chain"
        cfg_path = write_config(tmp_path, "ci_chain")
        base = ["--config", str(cfg_path), "--output.dir", str(out)]
        assert main(["train", *base, "--period", "a"]) == 0
        assert main(["train", *base, "--period", "b"]) == 0
        assert main([
            "align", *base,
            "--space-a", str(out / "space_a.txt"),
            "--space-b", str(out / "space_b.txt"),
        ]) == 0
        assert (out / "aligned_a.txt").exists()

    def test_leaderboard(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path, "lead1")
        assert main(["pipeline", "--config", str(cfg_path)]) == 0
        cfg2_path = write_config(tmp_path, "lead2", **{"space.kind": "ppmi"})
        assert main(["pipeline", "--config", str(cfg2_path)]) == 0
        capsys.readouterr()
        board_dir = tmp_path / "board"
        code = main([
            "leaderboard", "--config", str(cfg_path),
            "--output.dir", str(board_dir),
            str(tmp_path / "lead1" / "ranking.tsv"),
            str(tmp_path / "lead2" / "ranking.tsv"),
        ])
        assert code == 0
        text = capsys.readouterr().out
        assert "lead1" in text and "lead2" in text
        assert (board_dir / "leaderboard.tsv").exists()
        tsv = (board_dir / "leaderboard.tsv").read_text(encoding="utf-8")
        assert tsv.splitlines()[0] == "name\tspace\talign\tmeasure\tspearman"

    def test_validate_subcommand(self, tmp_path, capsys):
        cfg_path = write_config(tmp_path, "val")
        assert main(["validate", "--config", str(cfg_path)]) == 0
        assert "ok" in capsys.readouterr().out
        bad = write_config(tmp_path, "valbad", **{"align.method": "none"})
        assert main(["validate", "--config", str(bad)]) == 1
