"""Experiment configuration files (YAML)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .auctions import FORMATS, SECOND_PRICE
from .contracts import GENERAL, ONE_TIME, make_contract
from .exceptions import ConfigError
from .info_model import MODELS, make_model
from .preferences import make_utility

PA_TIMINGS = ("after_value",)
TOP_LEVEL = {"name", "model", "utility", "contracts", "format", "alphas", "n_samples", "seed",
             "pa", "output", "plot", "closed_form"}


@dataclass
class PAConfig:
    cost: str = "quadratic"
    gamma: float = 1.0
    e_hi: float | None = None
    timing: str = "after_value"


@dataclass
class ExperimentConfig:
    name: str
    model: dict
    utility: dict
    contracts: list
    format: str = SECOND_PRICE
    alphas: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75])
    n_samples: int = 100_000
    seed: int = 0
    pa: PAConfig | None = None
    output: str = "out"
    plot: bool = True
    closed_form: bool = True

    def build_model(self):
        params = dict(self.model.get("params") or {})
        return make_model(self.model["name"], **params)

    def build_utility(self):
        return make_utility(self.utility)

    def build_cost(self):
        from .principal_agent import CostFunction

        if self.pa is None:
            return None
        return CostFunction.quadratic(self.pa.gamma, self.pa.e_hi)

    def contract_specs(self):
        return [{"kind": c} if isinstance(c, str) else dict(c) for c in self.contracts]

    def config_hash(self):
        blob = json.dumps(asdict(self), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()


def _key_lines(text):
    """Map dotted keys to 1-based line numbers."""
    lines = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = f"{prefix}{k.value}"
                lines[key] = k.start_mark.line + 1
                walk(v, key + ".")
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                lines[f"{prefix[:-1]}[{i}]"] = v.start_mark.line + 1
                walk(v, f"{prefix[:-1]}[{i}].")

    if root is not None:
        walk(root, "")
    return lines


def parse_config(text, source="<string>"):
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        raise ConfigError(f"{source}: invalid YAML", line=mark.line + 1 if mark else None) from err
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    lines = _key_lines(text)

    def fail(msg, key):
        return ConfigError(f"{source}: {msg}", field=key, line=lines.get(key))

    unknown = sorted(set(raw) - TOP_LEVEL)
    if unknown:
        raise fail(f"unknown key {unknown[0]!r}", unknown[0])

    model = raw.get("model")
    if isinstance(model, str):
        model = {"name": model}
    if not isinstance(model, dict) or "name" not in model:
        raise fail("model needs a name", "model")
    if model["name"] not in MODELS:
        raise fail(f"unknown model {model['name']!r}; choose from {sorted(MODELS)}", "model.name")

    contracts = raw.get("contracts")
    if not isinstance(contracts, list) or not contracts:
        raise fail("contracts must be a non-empty list", "contracts")

    fmt = raw.get("format", SECOND_PRICE)
    if fmt not in FORMATS:
        raise fail(f"format must be one of {FORMATS}", "format")

    alphas = raw.get("alphas", [0.0, 0.25, 0.5, 0.75])
    if not isinstance(alphas, list) or not alphas:
        raise fail("alphas must be a non-empty list", "alphas")
    for i, a in enumerate(alphas):
        if not isinstance(a, (int, float)) or not 0.0 <= a < 1.0:
            raise fail(f"alpha {a!r} outside [0, 1)", f"alphas[{i}]")

    n = raw.get("n_samples", 100_000)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise fail("n_samples must be a positive integer", "n_samples")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise fail("seed must be a nonnegative integer", "seed")

    pa = raw.get("pa")
    if pa is not None:
        if not isinstance(pa, dict):
            raise fail("pa must be a mapping", "pa")
        extra = sorted(set(pa) - {"cost", "gamma", "e_hi", "timing"})
        if extra:
            raise fail(f"unknown key {extra[0]!r}", f"pa.{extra[0]}")
        pa = PAConfig(**pa)
        if pa.cost != "quadratic":
            raise fail("only quadratic effort costs can be configured", "pa.cost")
        if not isinstance(pa.gamma, (int, float)) or pa.gamma <= 0:
            raise fail("gamma must be positive", "pa.gamma")
        if pa.timing not in PA_TIMINGS:
            raise fail(f"timing must be one of {PA_TIMINGS}", "pa.timing")
        if fmt != SECOND_PRICE:
            raise fail("hidden-effort sweeps run the second price auction only", "format")

    cfg = ExperimentConfig(
        name=str(raw.get("name", Path(source).stem)),
        model=model,
        utility=raw.get("utility") or {"kind": "linear"},
        contracts=contracts,
        format=fmt,
        alphas=[float(a) for a in alphas],
        n_samples=n,
        seed=seed,
        pa=pa,
        output=str(raw.get("output", "out")),
        plot=bool(raw.get("plot", True)),
        closed_form=bool(raw.get("closed_form", True)),
    )

    # resolve names now so that errors carry line numbers
    try:
        cfg.build_model()
    except (TypeError, ValueError) as err:
        raise fail(f"bad model parameters: {err}", "model.params") from err
    try:
        cfg.build_utility()
    except (TypeError, ValueError, KeyError) as err:
        raise fail(f"bad utility: {err}", "utility") from err
    for i, spec in enumerate(cfg.contract_specs()):
        try:
            c = make_contract(spec, 0.0 if spec.get("kind") not in (GENERAL, ONE_TIME) else None)
        except (TypeError, ValueError, KeyError) as err:
            raise fail(f"bad contract: {err}", f"contracts[{i}]") from err
        if pa is not None and c.kind not in ("posc", "plsc"):
            raise fail("hidden-effort sweeps take posc and plsc contracts", f"contracts[{i}]")
    if pa is not None:
        try:
            cfg.build_cost()
        except ValueError as err:
            raise fail(str(err), "pa.e_hi") from err
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from err
    return parse_config(text, str(path))


def alpha_grid(start=0.0, stop=0.9, step=0.1):
    return [float(a) for a in np.round(np.arange(start, stop + step / 2, step), 10)]
