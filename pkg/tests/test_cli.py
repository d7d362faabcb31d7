"""Command-line entry point: subcommands and exit codes."""
from pathlib import Path

import pytest

from main import EXIT_ERROR, EXIT_OK, build_parser, main

EXPERIMENTS_DIR = Path(__file__).parent.parent / "experiments"


class TestCli:

    def test_validate_config(self):
        assert main(["validate-config", "-c", str(EXPERIMENTS_DIR / "star_hub.yaml")]) == EXIT_OK

    def test_analytic_writes_to_out(self, tmp_path):
        code = main(["analytic", "-c", str(EXPERIMENTS_DIR / "chain_node2_delay.yaml"), "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert (tmp_path / "report.json").exists()
        print("✅ TEST 1 PASSED: analytic subcommand exits 0 and writes its report")

    def test_mrf(self, tmp_path):
        code = main(["mrf", "-c", str(EXPERIMENTS_DIR / "mrf_gaussian_static.yaml"), "-o", str(tmp_path)])
        assert code == EXIT_OK

    def test_export_dot(self, tmp_path):
        code = main(["export-dot", "-c", str(EXPERIMENTS_DIR / "star_leaf.yaml"), "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert sorted(p.name for p in tmp_path.glob("*.dot")) == ["generative.dot", "moral.dot", "predicted.dot"]

    def test_missing_config_is_an_error(self, tmp_path):
        assert main(["validate-config", "-c", str(tmp_path / "nope.yaml")]) == EXIT_ERROR

    def test_invalid_document_is_an_error(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("seed: -3\nsystem: {nodes: [a]}\n", encoding="utf-8")
        assert main(["analytic", "-c", str(bad)]) == EXIT_ERROR

    def test_mrf_without_field_is_an_error(self, tmp_path):
        assert main(["mrf", "-c", str(EXPERIMENTS_DIR / "star_leaf.yaml"), "-o", str(tmp_path)]) == EXIT_ERROR

    def test_run_requires_config(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["run"])

    def test_run_overrides(self):
        args = build_parser().parse_args(["run", "-c", "x.yaml", "--trials", "3", "--threads", "2", "--seed", "9"])
        assert (args.trials, args.threads, args.seed) == (3, 2, 9)
