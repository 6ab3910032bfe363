"""Command-line entry point: ``privml <command> --config FILE [--set k=v ...] --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 privacy budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import classifier, harness
from .config import ConfigError, load_config
from .dataset import ParseError, ValidationError, dump_sparse, generate_predictions
from .dp import BudgetExhausted, PrivacyBudget, make_rng

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="privml", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, out=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
        if out:
            sp.add_argument("--out", required=True, help="output directory")
        return sp

    add("validate", "check a configuration and print the resolved values", out=False)
    add("select", "cross-validated feature selection + private naive Bayes")
    add("train", "train a naive Bayes model on the whole dataset")
    ev = add("evaluate", "evaluate a saved model and write its predictions")
    ev.add_argument("--model", required=True, help="model.json written by 'train'")
    add("roc", "private ROC curves against the exact curve")
    add("sweep", "epsilon (and k/alpha/t) sweep")
    add("synth", "write a synthetic dataset and prediction set")
    return p


def _cmd_validate(cfg, args):
    sys.stdout.write(cfg.to_text())


def _cmd_select(cfg, args):
    harness.emit_outputs(harness.run_selection_experiment(cfg), args.out)


def _cmd_roc(cfg, args):
    harness.emit_outputs(harness.run_roc_experiment(cfg), args.out)


def _cmd_sweep(cfg, args):
    harness.emit_outputs(harness.sweep(cfg), args.out)


def _cmd_train(cfg, args):
    d = harness.load_dataset(cfg)
    eps = float(cfg["classifier.epsilon"])
    budget = PrivacyBudget(eps)
    model = classifier.nb_train(d, eps, make_rng(cfg["run.seed"], 0, 0, 3), budget,
                                smoothing=cfg["classifier.smoothing"])
    os.makedirs(args.out, exist_ok=True)
    model.save(os.path.join(args.out, "model.json"))
    r = harness.RunReport("train", cfg.to_dict())
    r.runs.append({"epsilon_spent": budget.spent,
                   "ledger": [[lab, e] for lab, e in budget.ledger]})
    harness.emit_outputs(r, args.out)


def _cmd_evaluate(cfg, args):
    model = classifier.NaiveBayesModel.load(args.model)
    d = harness.load_dataset(cfg)
    preds = classifier.predictions(model, d)
    r = harness.RunReport("evaluate", cfg.to_dict())
    r.runs.append({"accuracy": classifier.evaluate_accuracy(model, d),
                   "majority": classifier.majority_accuracy(d.labels)})
    r.tables["predictions"] = harness.Table(["label", "p"],
                                            [[int(a), float(b)] for a, b in zip(preds.labels, preds.p)])
    harness.emit_outputs(r, args.out)


def _cmd_synth(cfg, args):
    os.makedirs(args.out, exist_ok=True)
    dump_sparse(harness.load_dataset(cfg), os.path.join(args.out, "data.txt"))
    labels, p = generate_predictions(cfg["predictions.n"], cfg["predictions.n_pos"],
                                     cfg["predictions.separation"], cfg["dataset.seed"],
                                     cfg["predictions.sharpness"])
    with open(os.path.join(args.out, "predictions.csv"), "w", encoding="utf-8") as fh:
        fh.write("label,p\n")
        for a, b in zip(labels, np.asarray(p)):
            fh.write(f"{int(a)},{float(b)!r}\n")


COMMANDS = {
    "validate": _cmd_validate,
    "select": _cmd_select,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "roc": _cmd_roc,
    "sweep": _cmd_sweep,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        COMMANDS[args.command](cfg, args)
    except (ConfigError, ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
