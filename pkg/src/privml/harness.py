"""Experiment runners: cross-validated selection + NB, private ROC, sweeps.

Every random draw comes from ``make_rng(run.seed, run, fold, stage)`` so a
report is a pure function of the configuration.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import classifier, roc, selection
from .config import ExperimentConfig
from .dataset import (SparseDataset, generate_predictions, generate_synthetic, load_predictions,
                      load_sparse, sample_features, split_folds)
from .dp import PrivacyBudget, make_rng
from .scoring import score_table

REPORT_SCHEMA = "privml.report"
REPORT_VERSION = 1

# stage ids for the RNG stream tree
_SPLIT, _SAMPLE, _SELECT, _TRAIN, _ROC_RM, _ROC_FS, _ROC_LAP = range(7)


@dataclass
class Table:
    columns: List[str]
    rows: List[list] = field(default_factory=list)

    def to_dict(self):
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


@dataclass
class RunReport:
    kind: str
    config: Dict[str, object]
    runs: List[Dict[str, object]] = field(default_factory=list)
    aggregates: Dict[str, Dict[str, float]] = field(default_factory=dict)
    tables: Dict[str, Table] = field(default_factory=dict)
    plots: Dict[str, Table] = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": REPORT_SCHEMA,
            "version": REPORT_VERSION,
            "kind": self.kind,
            "config": self.config,
            "runs": self.runs,
            "aggregates": self.aggregates,
            "tables": {k: t.to_dict() for k, t in self.tables.items()},
            "plots": {k: t.to_dict() for k, t in self.plots.items()},
        }

    def to_json(self) -> str:
        return json.dumps(_json_safe(self.to_dict()), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, doc) -> "RunReport":
        if doc.get("schema") != REPORT_SCHEMA or doc.get("version") != REPORT_VERSION:
            raise ValueError("unsupported report document")
        tab = lambda d: Table(d["columns"], d["rows"])
        return cls(doc["kind"], doc["config"], doc["runs"], doc["aggregates"],
                   {k: tab(v) for k, v in doc["tables"].items()},
                   {k: tab(v) for k, v in doc["plots"].items()})


def _json_safe(x):
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def aggregate(values) -> Dict[str, float]:
    v = np.asarray(values, dtype=np.float64)
    if len(v) == 0:
        return {"median": float("nan"), "mean": float("nan"), "std": float("nan"), "count": 0}
    return {"median": float(np.median(v)), "mean": float(np.mean(v)),
            "std": float(np.std(v)), "count": int(len(v))}


def load_dataset(cfg: ExperimentConfig) -> SparseDataset:
    path = cfg["dataset.path"]
    if path:
        return load_sparse(path)
    return generate_synthetic(cfg["dataset.num_tuples"], cfg["dataset.num_features"],
                              cfg["dataset.num_predictive"], cfg["dataset.flip_prob"],
                              cfg["dataset.sparsity"], cfg["dataset.seed"])


def _split_eps(eps: float, fraction: float) -> Tuple[float, float]:
    if math.isinf(eps):
        return eps, eps
    return fraction * eps, eps - fraction * eps


def _select(cfg: ExperimentConfig, train: SparseDataset, eps: float, rng, budget):
    """Return ``(mask, truth)`` for the configured method."""
    method = cfg["selection.method"]
    if method == "none":
        all_on = np.ones(train.num_features, dtype=bool)
        return all_on, all_on
    table = score_table(train, cfg["score.kind"], model=cfg["privacy.model"])
    tau = float(cfg["selection.tau"])
    if method == "topk":
        k = int(cfg["selection.topk"])
        truth = selection.exact_topk(table, k)
        got = selection.select_topk_perturbation(table, k, eps, rng, budget)
    else:
        truth = selection.exact_threshold(table, tau)
        if method == "score-perturbation":
            got = selection.select_score_perturbation(table, tau, eps, rng, budget)
        elif method == "ptt":
            got = selection.select_ptt(table, tau, eps, bool(cfg["selection.monotone_hint"]), rng, budget)
        elif method == "noisycut":
            got = selection.select_noisycut(table, tau, eps, rng, budget)
        else:
            got = selection.select_cluster(table, cfg["selection.cluster_k"],
                                           cfg["selection.cluster_rounds"], tau, eps, rng, budget,
                                           domain_high=float(len(train)))
    return got.selected, truth.selected


def run_selection_experiment(cfg: ExperimentConfig) -> RunReport:
    """Cross-validated (optional sampling) -> selection -> private NB -> accuracy."""
    cfg.validate()
    d = load_dataset(cfg)
    eps = cfg.epsilon
    seed = cfg["run.seed"]
    folds = cfg["run.folds"]
    r_rate = cfg["selection.sample_rate"]
    eps_sel, eps_nb = _split_eps(eps, cfg.selection_split)
    if cfg["selection.method"] == "none":
        eps_sel, eps_nb = 0.0, eps
    report = RunReport("selection", cfg.to_dict())
    per_run = {"accuracy": [], "majority": [], "precision": [], "recall": [], "f1": []}
    for run in range(cfg["run.runs"]):
        split = split_folds(len(d), folds, make_rng(seed, run, 0, _SPLIT))
        fold_stats = []
        for f in range(folds):
            budget = PrivacyBudget(eps)
            train = d.subset(split.train_indices[f])
            test = d.subset(split.test_indices[f])
            if r_rate > 0:
                train = sample_features(train, r_rate, make_rng(seed, run, f, _SAMPLE))
            mask, truth = _select(cfg, train, eps_sel, make_rng(seed, run, f, _SELECT), budget)
            model = classifier.nb_train(train, eps_nb, make_rng(seed, run, f, _TRAIN), budget,
                                        feature_mask=mask, smoothing=cfg["classifier.smoothing"])
            acc = classifier.evaluate_accuracy(model, test)
            pre, rec, f1 = selection.selection_metrics(truth, mask)
            stats = {
                "run": run, "fold": f, "accuracy": acc,
                "majority": classifier.majority_accuracy(test.labels),
                "precision": pre, "recall": rec, "f1": f1,
                "selected": int(mask.sum()), "truth_size": int(truth.sum()),
                "epsilon_spent": budget.spent,
                "ledger": [[label, e] for label, e in budget.ledger],
            }
            report.runs.append(stats)
            fold_stats.append(stats)
        for key in per_run:
            per_run[key].append(float(np.mean([s[key] for s in fold_stats])))
    report.aggregates = {k: aggregate(v) for k, v in per_run.items()}
    table = Table(["run"] + list(per_run))
    for i in range(cfg["run.runs"]):
        table.rows.append([i] + [per_run[k][i] for k in per_run])
    report.tables["selection_runs"] = table
    return report


def load_prediction_set(cfg: ExperimentConfig) -> classifier.PredictionSet:
    source = cfg["predictions.source"]
    if source == "file":
        labels, p = load_predictions(cfg["predictions.path"])
        return classifier.PredictionSet(labels, p)
    if source == "synthetic":
        labels, p = generate_predictions(cfg["predictions.n"], cfg["predictions.n_pos"],
                                         cfg["predictions.separation"], cfg["dataset.seed"],
                                         cfg["predictions.sharpness"])
        return classifier.PredictionSet(labels, p)
    # train NB on the first fold's training part, predict its held-out part
    d = load_dataset(cfg)
    split = split_folds(len(d), cfg["run.folds"], make_rng(cfg["run.seed"], 0, 0, _SPLIT))
    train = d.subset(split.train_indices[0])
    test = d.subset(split.test_indices[0])
    eps_c = float(cfg["classifier.epsilon"])
    model = classifier.nb_train(train, eps_c, make_rng(cfg["run.seed"], 0, 0, _TRAIN),
                                smoothing=cfg["classifier.smoothing"])
    return classifier.predictions(model, test)


def _roc_methods(cfg: ExperimentConfig):
    chooser = cfg["roc.chooser"]
    return ["recursive-medians", "fixed-space"] if chooser == "both" else [chooser]


def run_roc_experiment(cfg: ExperimentConfig, preds: Optional[classifier.PredictionSet] = None) -> RunReport:
    """Median AUC errors of PriROC (each chooser) and the Laplace baseline."""
    cfg.validate()
    ps = load_prediction_set(cfg) if preds is None else preds
    eps = cfg.epsilon
    seed = cfg["run.seed"]
    k, alpha, t = cfg["roc.k"], cfg["roc.alpha"], cfg["roc.t"]
    frac, delta = cfg["roc.eps1_fraction"], cfg["roc.delta"]
    exact = roc.exact_roc(ps)
    lap_thresholds = roc.empirical_quantile_thresholds(ps, t)
    fs_thresholds = roc.choose_fixed_space(len(ps), alpha)
    bias = roc.discretization_bias(ps, fs_thresholds)
    report = RunReport("roc", cfg.to_dict())
    report.aggregates["exact_auc"] = aggregate([exact.auc])
    names = _roc_methods(cfg) + ["laplace"]
    errors = {n: [] for n in names}
    l1 = {n: [] for n in names}
    inside = []
    last_curves = {}
    for run in range(cfg["run.runs"]):
        row = {"run": run}
        for name in names:
            budget = PrivacyBudget(eps)
            if name == "laplace":
                curve = roc.laplace_roc_baseline(ps, lap_thresholds, eps,
                                                 make_rng(seed, run, 0, _ROC_LAP), budget)
            elif name == "fixed-space":
                curve = roc.priroc(ps, eps, frac, name, alpha, make_rng(seed, run, 0, _ROC_FS), budget)
            else:
                curve = roc.priroc(ps, eps, frac, name, k, make_rng(seed, run, 0, _ROC_RM), budget)
            err = abs(curve.auc - exact.auc)
            dist = roc.curve_l1_distance(exact, curve)
            errors[name].append(err)
            l1[name].append(dist)
            row[f"{name}.auc"] = curve.auc
            row[f"{name}.auc_error"] = err
            row[f"{name}.curve_l1"] = dist
            row[f"{name}.epsilon_spent"] = budget.spent
            row[f"{name}.ledger"] = [[lab, e] for lab, e in budget.ledger]
            last_curves[name] = curve
            if name == "fixed-space":
                half = eps if math.isinf(eps) else eps / 2
                b = roc.theorem5_bounds(curve, ps.n_pos, ps.n_neg, fs_thresholds.num_buckets,
                                        half, delta, bias)
                row["bounds"] = {"X": b.X, "Y": b.Y, "upper_area": b.upper_area,
                                 "lower_area": b.lower_area, "bias": b.bias}
                inside.append(float(b.contains(exact.auc)))
        report.runs.append(row)
    for name in names:
        report.aggregates[f"{name}.auc_error"] = aggregate(errors[name])
        report.aggregates[f"{name}.curve_l1"] = aggregate(l1[name])
    if inside:
        report.aggregates["fixed-space.bound_coverage"] = aggregate(inside)
    summary = Table(["method", "median_auc_error", "median_curve_l1"])
    for name in names:
        summary.rows.append([name, float(np.median(errors[name])), float(np.median(l1[name]))])
    report.tables["roc_errors"] = summary
    report.plots["roc_exact"] = Table(["fpr", "tpr"], exact.points.tolist())
    for name, curve in last_curves.items():
        report.plots[f"roc_{name}"] = Table(["fpr", "tpr"], curve.points.tolist())
    return report


def sweep(cfg: ExperimentConfig) -> RunReport:
    """Grid over ``sweep.epsilons`` (and ``sweep.settings`` for ROC sweeps)."""
    cfg.validate()
    report = RunReport(f"sweep-{cfg['sweep.kind']}", cfg.to_dict())
    if cfg["sweep.kind"] == "roc":
        preds = load_prediction_set(cfg)
        table = Table(["epsilon", "k", "alpha", "t", "method", "median_auc_error", "median_curve_l1"])
        for eps in cfg.sweep_epsilons:
            for k, alpha, t in cfg.sweep_settings:
                sub = cfg.replace(privacy__epsilon=eps, roc__k=k, roc__alpha=alpha, roc__t=t)
                r = run_roc_experiment(sub, preds)
                for row in r.tables["roc_errors"].rows:
                    table.rows.append([eps, k, alpha, t] + row)
        report.tables["sweep_roc"] = table
        for method in sorted({row[4] for row in table.rows}):
            first = cfg.sweep_settings[0]
            pts = [[row[0], row[5]] for row in table.rows
                   if row[4] == method and tuple(row[1:4]) == first]
            report.plots[f"error_vs_epsilon_{method}"] = Table(["epsilon", "median_auc_error"], pts)
    else:
        table = Table(["epsilon", "median_accuracy", "median_f1", "median_majority"])
        for eps in cfg.sweep_epsilons:
            r = run_selection_experiment(cfg.replace(privacy__epsilon=eps))
            table.rows.append([eps, r.aggregates["accuracy"]["median"], r.aggregates["f1"]["median"],
                               r.aggregates["majority"]["median"]])
        report.tables["sweep_selection"] = table
        report.plots["accuracy_vs_epsilon"] = Table(["epsilon", "median_accuracy"],
                                                    [[r[0], r[1]] for r in table.rows])
    return report


def emit_outputs(r: RunReport, out_dir) -> List[str]:
    """Write report.json, one CSV per table and one .dat file per plot series."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    path = os.path.join(out_dir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(r.to_json())
    written.append(path)
    for name, table in sorted(r.tables.items()):
        path = os.path.join(out_dir, f"{name}.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(table.columns)
            for row in table.rows:
                w.writerow([_cell(c) for c in row])
        written.append(path)
    for name, table in sorted(r.plots.items()):
        path = os.path.join(out_dir, f"{name}.dat")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# " + " ".join(table.columns) + "\n")
            for row in table.rows:
                fh.write(" ".join(_cell(c) for c in row) + "\n")
        written.append(path)
    return written


def _cell(c) -> str:
    if isinstance(c, (float, np.floating)):
        return repr(float(c))
    return str(c)


def load_report(path) -> RunReport:
    with open(path, "r", encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))
