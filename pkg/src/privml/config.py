"""Flat ``key = value`` experiment configuration with dotted section keys.

Lines starting with ``#`` are comments.  Every key has a typed default; an
override such as ``--set privacy.epsilon=0.5`` replaces exactly one key.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

SELECTION_METHODS = ("none", "score-perturbation", "topk", "ptt", "noisycut", "cluster")
ROC_SOURCES = ("synthetic", "file", "classifier")
ROC_CHOOSERS = ("fixed-space", "recursive-medians")
SWEEP_KINDS = ("roc", "selection")

DEFAULTS: Dict[str, object] = {
    "dataset.path": "",
    "dataset.num_tuples": 2000,
    "dataset.num_features": 5000,
    "dataset.num_predictive": 50,
    "dataset.flip_prob": 0.2,
    "dataset.sparsity": 20,
    "dataset.seed": 0,
    "predictions.source": "synthetic",
    "predictions.path": "",
    "predictions.n": 558,
    "predictions.n_pos": 481,
    "predictions.separation": 2.33,
    "predictions.sharpness": 2.0,
    "score.kind": "tc",
    "selection.method": "ptt",
    "selection.tau": 200.0,
    "selection.topk": 50,
    "selection.sample_rate": 0,
    "selection.split": "auto",
    "selection.monotone_hint": False,
    "selection.cluster_k": 5,
    "selection.cluster_rounds": 5,
    "classifier.smoothing": 1.0,
    "classifier.epsilon": math.inf,
    "roc.chooser": "both",
    "roc.k": 10,
    "roc.alpha": 1.0,
    "roc.t": 10,
    "roc.eps1_fraction": 0.2,
    "roc.delta": 0.95,
    "privacy.epsilon": 1.0,
    "privacy.model": "unbounded",
    "run.folds": 10,
    "run.runs": 10,
    "run.seed": 0,
    "sweep.kind": "roc",
    "sweep.epsilons": "1,0.5,0.25,0.1",
    "sweep.settings": "10:1:10,9:0.5:9,8:0.25:8,7:0.125:7",
}

# default selection budget fraction per method
AUTO_SPLIT = {
    "none": 0.0,
    "score-perturbation": 0.5,
    "topk": 0.5,
    "noisycut": 0.5,
    "ptt": 0.2,
    "cluster": 0.2,
}


class ConfigError(ValueError):
    pass


def _coerce(key: str, raw: str):
    default = DEFAULTS[key]
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {type(default).__name__}") from None
    return raw


def parse_text(text: str) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def parse_overrides(items: Iterable[str]) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _float_list(key: str, text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers") from None


@dataclass
class ExperimentConfig:
    values: Dict[str, object] = field(default_factory=lambda: dict(DEFAULTS))

    def __getitem__(self, key: str):
        return self.values[key]

    def replace(self, **updates) -> "ExperimentConfig":
        """Copy with dotted keys given as ``section__name=value`` keywords."""
        vals = dict(self.values)
        for k, v in updates.items():
            key = k.replace("__", ".")
            if key not in DEFAULTS:
                raise ConfigError(f"unknown key {key!r}")
            vals[key] = v
        return ExperimentConfig(vals)

    @property
    def epsilon(self) -> float:
        return float(self.values["privacy.epsilon"])

    @property
    def selection_split(self) -> float:
        split = self.values["selection.split"]
        if isinstance(split, str) and split.strip().lower() == "auto":
            return AUTO_SPLIT[self.values["selection.method"]]
        try:
            return float(split)
        except (TypeError, ValueError):
            raise ConfigError("selection.split must be 'auto' or a number") from None

    @property
    def sweep_epsilons(self):
        return _float_list("sweep.epsilons", str(self.values["sweep.epsilons"]))

    @property
    def sweep_settings(self):
        """``(k, alpha, t)`` triples."""
        out = []
        for item in str(self.values["sweep.settings"]).split(","):
            parts = item.strip().split(":")
            if len(parts) != 3:
                raise ConfigError("sweep.settings entries must be k:alpha:t")
            try:
                out.append((int(parts[0]), float(parts[1]), int(parts[2])))
            except ValueError:
                raise ConfigError("sweep.settings entries must be k:alpha:t") from None
        return out

    def validate(self) -> "ExperimentConfig":
        v = self.values
        method = v["selection.method"]
        if method not in SELECTION_METHODS:
            raise ConfigError(f"selection.method must be one of {SELECTION_METHODS}")
        if v["score.kind"] not in ("tc", "dc", "pi", "ig"):
            raise ConfigError("score.kind must be tc, dc, pi or ig")
        if v["privacy.model"] not in ("unbounded", "bounded"):
            raise ConfigError("privacy.model must be unbounded or bounded")
        if v["predictions.source"] not in ROC_SOURCES:
            raise ConfigError(f"predictions.source must be one of {ROC_SOURCES}")
        if v["roc.chooser"] not in ROC_CHOOSERS + ("both",):
            raise ConfigError("roc.chooser must be fixed-space, recursive-medians or both")
        if v["sweep.kind"] not in SWEEP_KINDS:
            raise ConfigError(f"sweep.kind must be one of {SWEEP_KINDS}")
        split = self.selection_split
        if not 0.0 <= split <= 1.0:
            raise ConfigError("selection.split must lie in [0, 1]")
        if method != "none" and not 0.0 < split < 1.0:
            raise ConfigError("selection.split must lie strictly between 0 and 1 when selecting")
        if not self.epsilon > 0:
            raise ConfigError("privacy.epsilon must be positive")
        if not 0.0 < float(v["roc.delta"]) < 1.0:
            raise ConfigError("roc.delta must lie in (0, 1)")
        if not 0.0 < float(v["roc.eps1_fraction"]) < 1.0:
            raise ConfigError("roc.eps1_fraction must lie in (0, 1)")
        for key in ("run.folds", "run.runs", "roc.k", "roc.t", "selection.cluster_k",
                    "selection.cluster_rounds"):
            if int(v[key]) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if int(v["run.folds"]) < 2:
            raise ConfigError("run.folds must be >= 2")
        if int(v["selection.sample_rate"]) < 0:
            raise ConfigError("selection.sample_rate must be >= 0")
        for key in ("dataset.path", "predictions.path"):
            path = str(v[key])
            if path and not os.path.exists(path):
                raise ConfigError(f"{key}: file {path!r} does not exist")
        if v["predictions.source"] == "file" and not v["predictions.path"]:
            raise ConfigError("predictions.source = file needs predictions.path")
        self.sweep_epsilons
        self.sweep_settings
        return self

    def to_dict(self) -> Dict[str, object]:
        """JSON-safe copy (infinite floats become the string 'inf')."""
        return {k: ("inf" if isinstance(x, float) and math.isinf(x) else x)
                for k, x in sorted(self.values.items())}

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.to_dict().items())


def load_config(path: Optional[str] = None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    values = dict(DEFAULTS)
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                values.update(parse_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    values.update(parse_overrides(overrides))
    return ExperimentConfig(values).validate()
