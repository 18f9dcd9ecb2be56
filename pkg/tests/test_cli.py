import json

import numpy as np
import pytest

from rejectopt.cli import main
from rejectopt.data import synth_two_gaussian, write_scored_csv
from rejectopt.harness import SolutionEval
from rejectopt.metrics import (
    ClassPriors,
    CostMatrix,
    ThresholdPair,
    expected_cost,
)


@pytest.fixture(scope="module")
def scores_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("scores") / "scores.csv"
    write_scored_csv(synth_two_gaussian(120, 180, 0.9, -0.9, 1.1, seed=50), path)
    return str(path)


def run(*argv):
    return main(list(argv))


class TestOptimize:
    def test_writes_outputs_with_defaults(self, scores_csv, tmp_path):
        out = tmp_path / "run"
        code = run(
            "optimize", "--scores", scores_csv, "--pmax", "0.1", "--nmax", "0.1",
            "--seed", "3", "--out", str(out), "--gensize", "30",
        )
        assert code == 0
        doc = json.loads((out / "pareto.json").read_text())
        meta = doc["metadata"]
        assert meta["popsize"] == 20 and meta["p_max"] == 0.1 and meta["seed"] == 3
        assert (out / "pareto.txt").exists()
        assert all(s["feasible"] for s in doc["solutions"])

    def test_default_hyperparameters_recorded(self, scores_csv, tmp_path, capsys):
        out = tmp_path / "defaults"
        code = run(
            "optimize", "--scores", scores_csv, "--pmax", "0.15", "--nmax", "0.15",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads((out / "pareto.json").read_text())
        assert doc["metadata"]["popsize"] == 20 and doc["metadata"]["gensize"] == 100

    def test_seed_reproducibility(self, scores_csv, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(
                "optimize", "--scores", scores_csv, "--pmax", "0.1", "--nmax", "0.1",
                "--seed", "42", "--out", str(out), "--popsize", "8", "--gensize", "15",
            ) == 0
        assert (a / "pareto.json").read_bytes() == (b / "pareto.json").read_bytes()

    def test_no_feasible_exit_code(self, tmp_path):
        # dense evenly spaced scores plus near-zero caps: search finds nothing
        n = 400
        from rejectopt.data import ScoredDataset

        data = ScoredDataset(np.linspace(0, 1, n), np.where(np.arange(n) % 2 == 0, 1, -1))
        path = tmp_path / "dense.csv"
        write_scored_csv(data, path)
        code = run(
            "optimize", "--scores", str(path), "--pmax", "0.0001", "--nmax", "0.0001",
            "--out", str(tmp_path / "x"), "--popsize", "4", "--gensize", "2",
        )
        assert code == 3

    def test_missing_file_is_data_error(self, tmp_path):
        code = run(
            "optimize", "--scores", str(tmp_path / "nope.csv"), "--pmax", "0.1",
            "--nmax", "0.1", "--out", str(tmp_path / "o"),
        )
        assert code == 2

    def test_bad_flag_value_is_usage_error(self, scores_csv, tmp_path):
        out = tmp_path / "o"
        code = run(
            "optimize", "--scores", scores_csv, "--pmax", "1.7", "--nmax", "0.1",
            "--out", str(out),
        )
        assert code == 1
        assert not out.exists()  # flags are validated before any output is written

    def test_parser_defaults_mirror_published_config(self):
        from rejectopt.cli import build_parser

        args = build_parser().parse_args(
            ["optimize", "--scores", "x.csv", "--pmax", "0.1", "--nmax", "0.1", "--out", "o"]
        )
        assert (args.popsize, args.gensize) == (20, 100)
        assert (args.pc, args.pm) == (0.9, 0.5)
        assert (args.eta_c, args.eta_m) == (20.0, 20.0)


class TestBaseline:
    def test_ba_defaults(self, scores_csv, tmp_path, capsys):
        out = tmp_path / "ba"
        code = run(
            "baseline", "--scores", scores_csv, "--model", "ba", "--kmax", "0.1",
            "--out", str(out),
        )
        assert code == 0
        doc = json.loads((out / "baseline.json").read_text())
        assert doc["metadata"]["model"] == "ba"
        assert doc["metadata"]["cfn"] == 1.0 and doc["metadata"]["cfp"] == 1.0
        assert len(doc["solutions"]) == 1

    def test_ba_needs_kmax(self, scores_csv, tmp_path):
        code = run("baseline", "--scores", scores_csv, "--model", "ba", "--out", str(tmp_path / "o"))
        assert code == 1

    def test_tortorella_not_activated_exit_zero(self, scores_csv, tmp_path):
        out = tmp_path / "tort"
        code = run(
            "baseline", "--scores", scores_csv, "--model", "tortorella",
            "--ctp", "-1", "--ctn", "-50", "--cfp", "1", "--cfn", "1",
            "--crp", "0", "--crn", "0", "--out", str(out),
        )
        assert code == 0
        doc = json.loads((out / "baseline.json").read_text())
        assert doc["metadata"]["activated"] is False
        sol = doc["solutions"][0]
        assert sol["t1"] == sol["t2"]

    def test_tortorella_needs_costs(self, scores_csv, tmp_path):
        code = run(
            "baseline", "--scores", scores_csv, "--model", "tortorella",
            "--out", str(tmp_path / "o"),
        )
        assert code == 1

    def test_deterministic_output(self, scores_csv, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(
                "baseline", "--scores", scores_csv, "--model", "ba", "--kmax", "0.15",
                "--out", str(out),
            ) == 0
        assert (a / "baseline.json").read_bytes() == (b / "baseline.json").read_bytes()


class TestCompareCosts:
    def test_counts_sum_to_trials(self, scores_csv, tmp_path):
        out = tmp_path / "cc"
        code = run(
            "compare-costs", "--scores", scores_csv, "--cost-model", "cm1",
            "--trials", "6", "--seed", "11", "--out", str(out),
            "--popsize", "8", "--gensize", "8",
        )
        assert code == 0
        header, row = (out / "comparison.csv").read_text().strip().split("\n")
        assert header == "cost_model,lower,higher,identical,not_activated"
        model, lower, higher, identical, not_activated = row.split(",")
        assert model == "cm1"
        assert int(lower) + int(higher) + int(identical) == 6
        assert int(not_activated) <= int(identical)


class TestCurves:
    def test_outputs(self, scores_csv, tmp_path):
        out = tmp_path / "curves"
        code = run(
            "curves", "--scores", scores_csv, "--seed", "2", "--out", str(out),
            "--popsize", "8", "--gensize", "10",
        )
        assert code == 0
        lines = (out / "curves.csv").read_text().strip().split("\n")
        assert lines[0] == "reject_param,model,acc,auc,gmean,observed_rej"
        assert len(lines) == 1 + 30  # 15 grid values x 2 models
        for name in ("acc_rej.svg", "auc_rej.svg", "g_rej.svg"):
            svg = (out / name).read_text()
            assert svg.startswith("<svg") and 'viewBox="0 0 800 600"' in svg
            assert svg.count("<polyline") >= 2  # both model series present


class TestSelect:
    @pytest.fixture()
    def pareto_json(self, scores_csv, tmp_path):
        out = tmp_path / "opt"
        assert run(
            "optimize", "--scores", scores_csv, "--pmax", "0.2", "--nmax", "0.2",
            "--seed", "1", "--out", str(out), "--popsize", "12", "--gensize", "20",
        ) == 0
        return str(out / "pareto.json")

    def test_min_cost_matches_exhaustive(self, pareto_json, tmp_path):
        out = tmp_path / "sel"
        code = run(
            "select", "--pareto", pareto_json, "--mode", "min-cost",
            "--ctp", "-2", "--ctn", "-2", "--cfp", "30", "--cfn", "40",
            "--crp", "2", "--crn", "2", "--out", str(out),
        )
        assert code == 0
        chosen = json.loads((out / "selection.json").read_text())
        doc = json.loads(open(pareto_json).read())
        meta = doc["metadata"]
        priors = ClassPriors(
            meta["n_pos"] / (meta["n_pos"] + meta["n_neg"]),
            meta["n_neg"] / (meta["n_pos"] + meta["n_neg"]),
        )
        costs = CostMatrix(-2, -2, 30, 40, 2, 2)
        from rejectopt.cli import _metrics_from_record

        all_costs = [
            expected_cost(_metrics_from_record(rec, priors), priors, costs)
            for rec in doc["solutions"]
        ]
        assert chosen["selection"]["expected_cost"] == pytest.approx(min(all_costs))

    def test_best_metric_vacuous_caps(self, pareto_json, tmp_path):
        out = tmp_path / "sel2"
        code = run(
            "select", "--pareto", pareto_json, "--mode", "best-metric",
            "--metric", "auc", "--p-cap", "1.0", "--n-cap", "1.0", "--out", str(out),
        )
        assert code == 0
        chosen = json.loads((out / "selection.json").read_text())
        doc = json.loads(open(pareto_json).read())
        best_auc = max(
            (1.0 - rec["fnr"] + 1.0 - rec["fpr"]) / 2.0 for rec in doc["solutions"]
        )
        assert chosen["selection"]["value"] == pytest.approx(best_auc)

    def test_reselection_without_reoptimization(self, pareto_json, tmp_path):
        outs = []
        for i, cfn in enumerate(("5", "500")):
            out = tmp_path / f"sel{i}"
            assert run(
                "select", "--pareto", pareto_json, "--mode", "min-cost",
                "--ctp", "-2", "--ctn", "-2", "--cfp", "30", "--cfn", cfn,
                "--crp", "2", "--crn", "2", "--out", str(out),
            ) == 0
            outs.append(json.loads((out / "selection.json").read_text()))
        # both selections come from the same frozen Pareto file
        assert outs[0]["solution"] != outs[1]["solution"] or outs[0] != outs[1]

    def test_empty_eligible_exit_code(self, pareto_json, tmp_path):
        code = run(
            "select", "--pareto", pareto_json, "--mode", "best-metric",
            "--metric", "acc", "--cap", "-0.5", "--out", str(tmp_path / "x"),
        )
        assert code == 3

    def test_requires_metric_in_best_metric_mode(self, pareto_json, tmp_path):
        code = run(
            "select", "--pareto", pareto_json, "--mode", "best-metric",
            "--out", str(tmp_path / "x"),
        )
        assert code == 1
