"""Command-line surface: optimize, baseline, compare-costs, curves, select.

Every command validates its flags before touching the filesystem for
output, and every command is deterministic for a fixed --seed (byte
identical output files). Exit codes: 0 success (including a not-activated
baseline), 1 usage error, 2 data error, 3 no feasible/eligible solution.

compare-costs and curves mirror the experiment protocol: the scores file
is stratified-split 60/20/20 with --seed, the train part is discarded
(scores are already given), thresholds are tuned on the validation part
and evaluated on the test part. optimize and baseline tune on the whole
file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .baselines import ba_optimize, tortorella_optimize
from .charts import line_chart_svg
from .data import ScoredDataset, ScoresCsvError, SplitSpec, load_scored_csv, stratified_split
from .harness import (
    NoEligibleSolutionError,
    SolutionEval,
    builtin_cost_models,
    cost_comparison_experiment,
    curve_sweep,
    select_best_under_cap,
    select_min_cost,
    write_comparison_csv,
    write_curve_csv,
)
from .metrics import (
    ClassPriors,
    CostMatrix,
    EssentialMetrics,
    ThresholdPair,
    classify_with_rejection,
    empirical_priors,
    essential_metrics,
    expected_cost,
)
from .moba import MobaConfig, NoFeasibleSolutionError, evolve, pareto_document


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(path: str, doc: dict) -> None:
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_dataset(path: str) -> ScoredDataset:
    data = load_scored_csv(path)
    data.require_both_classes()
    return data


def _split_valid_test(data: ScoredDataset, seed: int) -> tuple[ScoredDataset, ScoredDataset]:
    _, valid, test = stratified_split(data, SplitSpec(0.6, 0.2, 0.2, seed))
    return valid, test


def _moba_config(args, p_max: float, n_max: float) -> MobaConfig:
    try:
        return MobaConfig(
            p_max=p_max,
            n_max=n_max,
            popsize=args.popsize,
            gensize=args.gensize,
            crossover_prob=args.pc,
            mutation_prob=args.pm,
            eta_c=args.eta_c,
            eta_m=args.eta_m,
            seed=args.seed,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _cost_matrix(args) -> CostMatrix:
    values = (args.ctp, args.ctn, args.cfp, args.cfn, args.crp, args.crn)
    if any(v is None for v in values):
        raise UsageError(
            "all six cost flags are required: --ctp --ctn --cfp --cfn --crp --crn"
        )
    try:
        return CostMatrix(*values)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _solution_record(data: ScoredDataset, t: ThresholdPair, feasible: bool = True) -> dict:
    m = essential_metrics(classify_with_rejection(data, t))
    return {
        "t1": t.t1,
        "t2": t.t2,
        "fpr": m.fpr_cls,
        "fnr": m.fnr_cls,
        "rpr": m.rpr,
        "rnr": m.rnr,
        "feasible": feasible,
    }


def _pareto_table(doc: dict) -> str:
    header = f"{'t1':>12} {'t2':>12} {'fpr':>8} {'fnr':>8} {'rpr':>8} {'rnr':>8}"
    lines = [header, "-" * len(header)]
    for s in doc["solutions"]:
        lines.append(
            f"{s['t1']:>12.6f} {s['t2']:>12.6f} {s['fpr']:>8.4f} {s['fnr']:>8.4f} "
            f"{s['rpr']:>8.4f} {s['rnr']:>8.4f}"
        )
    return "\n".join(lines) + "\n"


def cmd_optimize(args) -> int:
    cfg = _moba_config(args, args.pmax, args.nmax)
    data = _load_dataset(args.scores)
    result = evolve(data, cfg)
    doc = pareto_document(result, data)
    table = _pareto_table(doc)
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "pareto.json"), doc)
    _write_text(os.path.join(args.out, "pareto.txt"), table)
    print(f"{len(doc['solutions'])} Pareto solutions (caps rpr<={cfg.p_max}, rnr<={cfg.n_max})")
    print(table, end="")
    return 0


def cmd_baseline(args) -> int:
    if args.model == "tortorella":
        costs = _cost_matrix(args)
        data = _load_dataset(args.scores)
        res = tortorella_optimize(data, costs, empirical_priors(data))
        doc = {
            "metadata": {
                "model": "tortorella",
                "ctp": costs.ctp,
                "ctn": costs.ctn,
                "cfp": costs.cfp,
                "cfn": costs.cfn,
                "crp": costs.crp,
                "crn": costs.crn,
                "activated": res.activated,
                "degenerate_denominator": res.degenerate_denominator,
                "cost": res.cost,
                "n_pos": data.n_pos,
                "n_neg": data.n_neg,
            },
            "solutions": [_solution_record(data, res.thresholds)],
        }
        status = "activated" if res.activated else "not activated (t1 = t2)"
        summary = (
            f"tortorella: {status}; thresholds ({res.thresholds.t1:.6f}, "
            f"{res.thresholds.t2:.6f}); cost {res.cost:.6f}; rpr {res.rpr:.4f}; rnr {res.rnr:.4f}"
        )
    else:
        if args.kmax is None:
            raise UsageError("ba needs --kmax")
        if not 0.0 < args.kmax < 1.0:
            raise UsageError(f"--kmax must lie in (0,1), got {args.kmax}")
        data = _load_dataset(args.scores)
        res = ba_optimize(data, args.kmax, cfn=args.cfn, cfp=args.cfp)
        doc = {
            "metadata": {
                "model": "ba",
                "k_max": args.kmax,
                "cfn": args.cfn,
                "cfp": args.cfp,
                "objective": res.objective,
                "n_pos": data.n_pos,
                "n_neg": data.n_neg,
            },
            "solutions": [_solution_record(data, res.thresholds)],
        }
        summary = (
            f"ba: thresholds ({res.thresholds.t1:.6f}, {res.thresholds.t2:.6f}); "
            f"objective {res.objective:.6f}; rej {res.rej:.4f} (cap {args.kmax})"
        )
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "baseline.json"), doc)
    print(summary)
    return 0


def cmd_compare_costs(args) -> int:
    models = builtin_cost_models()
    if args.cost_model not in models:
        raise UsageError(f"unknown cost model {args.cost_model!r}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    cfg = _moba_config(args, 0.5, 0.5)  # caps are transferred per trial
    data = _load_dataset(args.scores)
    valid, test = _split_valid_test(data, args.seed)
    counts = cost_comparison_experiment(
        valid,
        test,
        models[args.cost_model],
        args.trials,
        cfg,
        args.seed,
        joint_correct=args.joint_correct_costs,
    )
    os.makedirs(args.out, exist_ok=True)
    write_comparison_csv(os.path.join(args.out, "comparison.csv"), [(args.cost_model, counts)])
    print(args.cost_model)
    print(f"  lower     {counts.lower}")
    print(f"  higher    {counts.higher}")
    print(f"  identical {counts.identical}   (not activated: {counts.not_activated})")
    if counts.no_feasible:
        print(f"  [{counts.no_feasible} trial(s) found no feasible pair; counted identical]")
    return 0


def cmd_curves(args) -> int:
    cfg = _moba_config(args, 0.5, 0.5)  # caps are swept per grid point
    data = _load_dataset(args.scores)
    valid, test = _split_valid_test(data, args.seed)
    points = curve_sweep(valid, test, cfg, args.seed, metric=args.metric)
    os.makedirs(args.out, exist_ok=True)
    write_curve_csv(os.path.join(args.out, "curves.csv"), points)
    charts = [
        ("acc", "acc_rej.svg", "ACC-Rej"),
        ("auc", "auc_rej.svg", "AUC-Rej"),
        ("gmean", "g_rej.svg", "G-Rej"),
    ]
    for attr, filename, title in charts:
        series: dict[str, list[tuple[float, float | None]]] = {"moba": [], "ba": []}
        for p in points:
            series[p.model].append((p.reject_param, getattr(p, attr)))
        svg = line_chart_svg(series, title, "abstention parameter", title.split("-")[0])
        _write_text(os.path.join(args.out, filename), svg)
    print(f"wrote {len(points)} curve points and {len(charts)} charts to {args.out}")
    return 0


def _metrics_from_record(rec: dict, priors: ClassPriors) -> EssentialMetrics:
    """Rebuild both rate families from an exported solution record."""
    fpr_cls, fnr_cls = rec["fpr"], rec["fnr"]
    rpr, rnr = rec["rpr"], rec["rnr"]
    tpr_cls, tnr_cls = 1.0 - fnr_cls, 1.0 - fpr_cls
    tpr_all, fnr_all = tpr_cls * (1.0 - rpr), fnr_cls * (1.0 - rpr)
    tnr_all, fpr_all = tnr_cls * (1.0 - rnr), fpr_cls * (1.0 - rnr)
    classified = priors.p_pos * (1.0 - rpr) + priors.p_neg * (1.0 - rnr)
    acc = (priors.p_pos * tpr_all + priors.p_neg * tnr_all) / classified if classified > 0 else None
    return EssentialMetrics(
        tpr_all=tpr_all,
        fnr_all=fnr_all,
        rpr=rpr,
        tnr_all=tnr_all,
        fpr_all=fpr_all,
        rnr=rnr,
        tpr_cls=tpr_cls,
        fnr_cls=fnr_cls,
        tnr_cls=tnr_cls,
        fpr_cls=fpr_cls,
        rej=priors.p_pos * rpr + priors.p_neg * rnr,
        acc=acc,
        auc=(tpr_cls + tnr_cls) / 2.0,
        gmean=math.sqrt(max(tpr_cls * tnr_cls, 0.0)),
    )


def cmd_select(args) -> int:
    try:
        with open(args.pareto, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        records = doc["solutions"]
        meta = doc.get("metadata", {})
    except (json.JSONDecodeError, KeyError) as e:
        raise ScoresCsvError(f"invalid Pareto JSON {args.pareto}: {e}") from None
    if not records:
        raise NoEligibleSolutionError("Pareto file contains no solutions")

    if args.p_pos is not None:
        if not 0.0 < args.p_pos < 1.0:
            raise UsageError("--p-pos must lie in (0,1)")
        priors = ClassPriors(args.p_pos, 1.0 - args.p_pos)
    elif "n_pos" in meta and "n_neg" in meta:
        total = meta["n_pos"] + meta["n_neg"]
        priors = ClassPriors(meta["n_pos"] / total, meta["n_neg"] / total)
    else:
        raise UsageError("priors unavailable: pass --p-pos or use a file with n_pos/n_neg metadata")

    solutions = [
        SolutionEval(ThresholdPair(rec["t1"], rec["t2"]), _metrics_from_record(rec, priors))
        for rec in records
    ]
    if args.mode == "min-cost":
        costs = _cost_matrix(args)
        best = select_min_cost(solutions, costs, priors)
        rationale = {
            "mode": "min-cost",
            "costs": {
                "ctp": costs.ctp,
                "ctn": costs.ctn,
                "cfp": costs.cfp,
                "cfn": costs.cfn,
                "crp": costs.crp,
                "crn": costs.crn,
            },
            "p_pos": priors.p_pos,
            "expected_cost": expected_cost(best.metrics, priors, costs),
        }
    else:
        if args.metric is None:
            raise UsageError("best-metric needs --metric {acc,auc,g}")
        best = select_best_under_cap(
            solutions,
            args.metric,
            max_rpr=args.p_cap,
            max_rnr=args.n_cap,
            max_rej=args.cap,
        )
        value = {"acc": best.metrics.acc, "auc": best.metrics.auc, "g": best.metrics.gmean}[
            args.metric
        ]
        rationale = {
            "mode": "best-metric",
            "metric": args.metric,
            "caps": {"p_cap": args.p_cap, "n_cap": args.n_cap, "overall": args.cap},
            "value": value,
        }

    m = best.metrics
    out_doc = {
        "selection": rationale,
        "solution": {
            "t1": best.thresholds.t1,
            "t2": best.thresholds.t2,
            "fpr": m.fpr_cls,
            "fnr": m.fnr_cls,
            "rpr": m.rpr,
            "rnr": m.rnr,
            "acc": m.acc,
            "auc": m.auc,
            "gmean": m.gmean,
            "rej": m.rej,
        },
    }
    os.makedirs(args.out, exist_ok=True)
    _write_json(os.path.join(args.out, "selection.json"), out_doc)
    print(
        f"selected ({best.thresholds.t1:.6f}, {best.thresholds.t2:.6f}) "
        f"by {rationale['mode']}"
    )
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scores", required=True, help="scores CSV (id,label,score)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--popsize", type=int, default=20)
    p.add_argument("--gensize", type=int, default=100)
    p.add_argument("--pc", type=float, default=0.9, help="crossover probability")
    p.add_argument("--pm", type=float, default=0.5, help="per-variable mutation probability")
    p.add_argument("--eta-c", type=float, default=20.0, dest="eta_c")
    p.add_argument("--eta-m", type=float, default=20.0, dest="eta_m")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rejectopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize", help="Pareto-optimal threshold pairs under per-class caps")
    _add_common(p)
    p.add_argument("--pmax", type=float, required=True, help="positive-class reject cap")
    p.add_argument("--nmax", type=float, required=True, help="negative-class reject cap")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("baseline", help="run a published baseline model")
    _add_common(p)
    p.add_argument("--model", choices=("ba", "tortorella"), required=True)
    p.add_argument("--kmax", type=float, default=None, help="ba: overall reject cap")
    p.add_argument("--cfn", type=float, default=1.0)
    p.add_argument("--cfp", type=float, default=1.0)
    p.add_argument("--ctp", type=float, default=None)
    p.add_argument("--ctn", type=float, default=None)
    p.add_argument("--crp", type=float, default=None)
    p.add_argument("--crn", type=float, default=None)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("compare-costs", help="count lower/higher/identical costs vs the hull baseline")
    _add_common(p)
    p.add_argument("--cost-model", choices=("cm1", "cm2", "cm3", "cm4"), required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--joint-correct-costs", action="store_true")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_compare_costs)

    p = sub.add_parser("curves", help="performance-rejection curves for both models")
    _add_common(p)
    p.add_argument("--metric", choices=("acc", "auc", "g"), default="auc",
                   help="selection metric for the bi-objective model")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("select", help="pick the best solution from a Pareto JSON")
    p.add_argument("--pareto", required=True, help="pareto.json from optimize")
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("min-cost", "best-metric"), required=True)
    p.add_argument("--metric", choices=("acc", "auc", "g"), default=None)
    p.add_argument("--cap", type=float, default=None, help="overall reject cap")
    p.add_argument("--p-cap", type=float, default=None, dest="p_cap")
    p.add_argument("--n-cap", type=float, default=None, dest="n_cap")
    p.add_argument("--p-pos", type=float, default=None, dest="p_pos",
                   help="positive-class prior (default: from file metadata)")
    p.add_argument("--ctp", type=float, default=None)
    p.add_argument("--ctn", type=float, default=None)
    p.add_argument("--cfp", type=float, default=None)
    p.add_argument("--cfn", type=float, default=None)
    p.add_argument("--crp", type=float, default=None)
    p.add_argument("--crn", type=float, default=None)
    p.set_defaults(func=cmd_select)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ScoresCsvError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except (NoFeasibleSolutionError, NoEligibleSolutionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
