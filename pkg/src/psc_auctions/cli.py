"""Command line driver: ``psc-auctions {bid,simulate,sweep,pa-sweep,verify}``."""

from __future__ import annotations

import argparse
import json
import sys

from .exceptions import ConfigError, NumericError, OracleUnavailable

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


def _load(args):
    from .config import load_config

    if args.config is None:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "n", None) is not None:
        cfg.n_samples = args.n
    return cfg


def _pick_contract(cfg, args):
    from .contracts import make_contract

    specs = cfg.contract_specs()
    if args.contract is not None:
        matches = [s for s in specs if s["kind"] == args.contract] or [{"kind": args.contract}]
        spec = matches[0]
    else:
        spec = specs[0]
    alpha = args.alpha if args.alpha is not None else cfg.alphas[0]
    return make_contract(spec, alpha)


def cmd_bid(args):
    from . import principal_agent as pa
    from .equilibrium import bid_eng, bid_general_sp, bid_sp
    from .validation import check_signal_profiles

    cfg = _load(args)
    model, u, cost = cfg.build_model(), cfg.build_utility(), cfg.build_cost()
    contract = _pick_contract(cfg, args)
    z = args.z if args.z is not None else [args.y1] * (model.n_buyers - 1)
    z = sorted(z, reverse=True)
    check_signal_profiles([args.y1] + z, model)
    if cost is not None:
        if contract.kind == "plsc":
            b = pa.bid_plsc_pa(model, u, cost, contract.alpha, args.y1, z[0])
        else:
            b = pa.bid_posc_pa(model, cost, contract.alpha, args.y1, z[0], utility=u)
    elif cfg.format == "english":
        b = bid_eng(model, u, contract, args.y1, z)
    elif contract.kind == "general":
        b = bid_general_sp(model, u, contract, args.y1, z[0])
    else:
        b = bid_sp(model, u, contract, args.y1, z[0])
    print(json.dumps({"model": model.name, "contract": str(contract), "format": cfg.format,
                      "y1": args.y1, "z": z, "bid": b}))
    return EXIT_OK


def cmd_simulate(args):
    from .auctions import english_payment_direct, run_english_clock, run_second_price
    from .equilibrium import BidFunction
    from .numerics import RandomStream

    cfg = _load(args)
    model, u, cost = cfg.build_model(), cfg.build_utility(), cfg.build_cost()
    contract = _pick_contract(cfg, args)
    stream = RandomStream(cfg.seed, 99)
    y = model.sample_signals(stream, 1)
    trace = {"model": model.name, "contract": str(contract), "format": cfg.format,
             "seed": cfg.seed, "signals": y[0].tolist()}
    if cfg.format == "english":
        out = english_payment_direct(model, u, contract, y, stream)
        clock = run_english_clock(model, u, contract, y, args.price_step, stream)
        trace["drop_prices"] = clock.extras["drop_prices"][0].tolist()
        trace["inferred_signals"] = clock.extras["inferred_signals"][0].tolist()
        trace["clock_payment"] = float(clock.auction_payment[0])
    else:
        strategy = BidFunction(model, u, contract, cost=cost).fit()
        out = run_second_price(model, strategy, contract, stream, signals=y)
        trace["bids"] = out.extras["bids"][0].tolist()
    trace.update({"winner": int(out.winner_index[0]), "auction_payment": float(out.auction_payment[0]),
                  "value": float(out.realized_value[0]), "sharing_payment": float(out.sharing_payment[0]),
                  "winner_profit": float(out.buyer_total_profit[0])})
    if cost is not None:
        trace["note"] = "value and sharing shown before the winner's effort"
    print(json.dumps(trace, indent=2))
    return EXIT_OK


def _sweep(args, require_pa):
    from .experiment import read_csv, run_experiment

    if args.config is None:
        raise ConfigError("--config is required for this command")
    out = run_experiment(args.config, out=args.out, seed=args.seed, n=args.n, require_pa=require_pa)
    rows = read_csv(out / "sweep.csv")
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    for r in rows:
        print(f"  {r.contract:>9} alpha={r.alpha:<6g} {r.estimator:>11} total={r.total:.6f}"
              + (f" +/- {r.stderr:.2g}" if r.stderr else ""))
    return EXIT_OK


def cmd_sweep(args):
    return _sweep(args, False)


def cmd_pa_sweep(args):
    return _sweep(args, True)


def cmd_verify(args):
    from .verify import verify_suite

    report = verify_suite(args.scope, echo=print)
    print(report.lines()[-1])
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser():
    p = argparse.ArgumentParser(prog="psc-auctions",
                                description="Auctions followed by profit-sharing contracts.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sweep=False):
        sp.add_argument("--config", help="experiment YAML file")
        sp.add_argument("--seed", type=int, help="override the configured seed")
        if sweep:
            sp.add_argument("--out", help="output directory (default: config 'output')")
            sp.add_argument("--n", type=int, help="override n_samples")

    b = sub.add_parser("bid", help="solve one indifference bid")
    common(b)
    b.add_argument("--y1", type=float, required=True, help="own signal")
    b.add_argument("--z", type=float, nargs="+", help="rival signals (default: all equal to y1)")
    b.add_argument("--alpha", type=float)
    b.add_argument("--contract", help="contract kind from the config (default: first)")
    b.set_defaults(func=cmd_bid)

    s = sub.add_parser("simulate", help="trace a single auction")
    common(s)
    s.add_argument("--alpha", type=float)
    s.add_argument("--contract")
    s.add_argument("--price-step", type=float, default=1e-4)
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="revenue sweep over share fractions")
    common(w, sweep=True)
    w.set_defaults(func=cmd_sweep)

    pw = sub.add_parser("pa-sweep", help="hidden-effort revenue sweep")
    common(pw, sweep=True)
    pw.set_defaults(func=cmd_pa_sweep)

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--scope", choices=["fast", "all"], default="fast")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, OracleUnavailable, FloatingPointError) as err:
        print(f"numeric failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
