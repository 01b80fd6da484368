"""Share-fraction sweeps: revenue rows, CSV output and run manifests."""

from __future__ import annotations

import csv
import json
import platform
import shutil
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .auctions import (CLOSED, MC, SECOND_PRICE, compare_cells, contract_cell,
                       revenue_closed_form_example1, revenue_quadrature)
from .config import load_config
from .contracts import GENERAL, ONE_TIME, PLSC, POSC, make_contract, marginal_slope_bound
from .info_model import Example1, Example2PA
from .numerics import RandomStream

CSV_HEADER = ["contract", "alpha", "format", "stage1", "stage2", "total", "stderr", "n", "estimator"]


@dataclass
class SweepRow:
    contract: str
    alpha: float
    format: str
    stage1: float
    stage2: float
    total: float
    stderr: float
    n: int
    estimator: str

    def as_csv(self):
        g = "%.12g"
        return [self.contract, g % self.alpha, self.format, g % self.stage1, g % self.stage2,
                g % self.total, g % self.stderr, str(self.n), self.estimator]


def _row(label, alpha, fmt, rb):
    return SweepRow(label, float(alpha), fmt, rb.stage1, rb.stage2, rb.total, rb.stderr_total,
                    rb.n_samples, rb.estimator)


def _closed_form(cfg, model, u, contract, cost):
    """Deterministic revenue for a cell, or None when no evaluator applies."""
    if not cfg.closed_form or model.n_buyers != 2:
        return None
    if cost is None:
        if isinstance(model, Example1) and u.is_linear and contract.kind != GENERAL:
            return revenue_closed_form_example1(contract.kind, contract.alpha)
        return revenue_quadrature(model, u, contract)
    from . import principal_agent as pa

    if contract.kind == PLSC:
        if isinstance(model, Example2PA) and u.is_linear and cost.kind == pa.QUADRATIC:
            return pa.revenue_plsc_pa_closed_form(cost.gamma, contract.alpha)
        return pa.revenue_plsc_pa_quadrature(model, u, cost, contract.alpha)
    if u.is_linear:
        return pa.revenue_posc_pa_quadrature(model, cost, contract.alpha)
    return None


def sweep_alpha(cfg):
    """Revenue rows for every (contract, share fraction) cell of a configuration.

    Monte Carlo rows reuse one stream of draws for every cell, so contracts
    are compared on common random numbers. Contracts without a share
    fraction (one-time payment, tabulated rules) produce a single row.
    """
    model, u, cost = cfg.build_model(), cfg.build_utility(), cfg.build_cost()
    specs = cfg.contract_specs()
    alphas = sorted(set(cfg.alphas))
    fixed = [i for i, s in enumerate(specs) if s["kind"] in (ONE_TIME, GENERAL)]
    results = {i: [] for i in range(len(specs))}
    for step, alpha in enumerate(alphas):
        members = [i for i in range(len(specs)) if i not in fixed or step == 0]
        cells, labels = [], {}
        for i in members:
            spec = dict(specs[i])
            contract = make_contract(spec, alpha)
            a = contract.alpha if contract.kind in (POSC, PLSC) else (
                marginal_slope_bound(contract) if contract.kind == GENERAL else 0.0)
            if cost is None:
                label = contract.kind
                cell = contract_cell(model, u, contract, cfg.format, label=f"{i}:{label}")
            else:
                from . import principal_agent as pa

                label = pa.PLSC_PA if contract.kind == PLSC else pa.POSC_PA
                cell = pa.pa_cell(model, u, cost, label, contract.alpha, label=f"{i}:{label}")
            cells.append(cell)
            labels[i] = (label, a, contract, cell.label)
        report = compare_cells(model, cells, cfg.n_samples, RandomStream(cfg.seed, 1))
        for i in members:
            label, a, contract, key = labels[i]
            closed = _closed_form(cfg, model, u, contract, cost)
            if closed is not None:
                results[i].append(_row(label, a, cfg.format, closed))
            results[i].append(_row(label, a, cfg.format, report.breakdowns[key]))
    rows = []
    for i in range(len(specs)):
        rows.extend(sorted(results[i], key=lambda r: (r.alpha, r.estimator != CLOSED)))
    return rows


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(r.as_csv())


def read_csv(path):
    with open(path, newline="") as fh:
        out = []
        for rec in csv.DictReader(fh):
            out.append(SweepRow(rec["contract"], float(rec["alpha"]), rec["format"],
                                float(rec["stage1"]), float(rec["stage2"]), float(rec["total"]),
                                float(rec["stderr"]), int(rec["n"]), rec["estimator"]))
        return out


def _versions():
    import sklearn
    import yaml

    return {"psc_auctions": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scikit-learn": sklearn.__version__, "pyyaml": yaml.__version__}


def run_experiment(config_path, out=None, seed=None, n=None, require_pa=False):
    """Run a sweep and write ``sweep.csv``, ``manifest.json`` and optionally ``plot.svg``.

    Outputs land in ``out`` (default: the config's ``output`` entry). If
    anything fails, files written by this call are removed again.
    """
    from .exceptions import ConfigError
    from .plot import emit_plot

    t0 = time.perf_counter()
    cfg = load_config(config_path)
    if seed is not None:
        cfg.seed = int(seed)
    if n is not None:
        if int(n) < 1:
            raise ConfigError("n must be positive", field="n_samples")
        cfg.n_samples = int(n)
    if require_pa and cfg.pa is None:
        raise ConfigError(f"{config_path}: pa-sweep needs a 'pa' block", field="pa")
    out = Path(out if out is not None else cfg.output)
    created = not out.exists()
    written = []
    try:
        rows = sweep_alpha(cfg)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "sweep.csv"
        written.append(csv_path)
        write_csv(rows, csv_path)
        if cfg.plot:
            svg = out / "plot.svg"
            written.append(svg)
            title = f"{cfg.name}: total revenue vs share fraction"
            emit_plot(rows, svg, title=title)
        manifest = {
            "name": cfg.name,
            "config": str(config_path),
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "n_samples": cfg.n_samples,
            "rows": len(rows),
            "wall_time_s": round(time.perf_counter() - t0, 3),
            "versions": _versions(),
        }
        cost = cfg.build_cost()
        if cost is not None:
            manifest["effort_cost"] = {"kind": cost.kind, "gamma": cost.gamma,
                                       "e_lo": cost.e_lo, "e_hi": cost.e_hi}
        man = out / "manifest.json"
        written.append(man)
        man.write_text(json.dumps(manifest, indent=2) + "\n")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        if created and out.exists():
            shutil.rmtree(out, ignore_errors=True)
        raise
    return out
