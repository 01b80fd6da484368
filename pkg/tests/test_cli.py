import json
import re
import textwrap
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from psc_auctions.cli import main
from psc_auctions.experiment import CSV_HEADER, SweepRow, read_csv
from psc_auctions.exceptions import EmptyInput
from psc_auctions.plot import emit_plot

CONFIGS = Path(__file__).parents[1] / "configs"
SVG = "{http://www.w3.org/2000/svg}"


def small_config(tmp_path, extra=""):
    p = tmp_path / "small.yaml"
    p.write_text(textwrap.dedent("""\
        name: small
        model: {name: example1}
        contracts: [posc, plsc]
        alphas: [0.0, 0.5]
        n_samples: 4000
        seed: 5
    """) + extra)
    return p


def test_sweep_is_deterministic(tmp_path, capsys):
    cfg = small_config(tmp_path)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    assert a.decode().splitlines()[0] == ",".join(CSV_HEADER)
    assert "wrote 8 rows" in capsys.readouterr().out
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "c"), "--seed", "6"]) == 0
    assert (tmp_path / "c" / "sweep.csv").read_bytes() != a


def test_sweep_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--config", str(small_config(tmp_path)), "--out", str(out), "--n", "2000"]) == 0
    rows = read_csv(out / "sweep.csv")
    assert {r.estimator for r in rows} == {"mc", "closed_form"}
    assert all(r.n == 2000 for r in rows if r.estimator == "mc")
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 5 and man["n_samples"] == 2000 and man["rows"] == len(rows)
    assert re.fullmatch(r"[0-9a-f]{64}", man["config_hash"])
    assert "numpy" in man["versions"]
    root = ET.parse(out / "plot.svg").getroot()
    assert root.tag == SVG + "svg"
    assert len(root.findall(f"{SVG}polyline")) == 2
    assert len(root.findall(f"{SVG}g")) == 2


def test_single_row_plot(tmp_path):
    row = SweepRow("plsc", 0.5, "second_price", 0.3, 0.1, 0.4, 0.0, 0, "closed_form")
    path = emit_plot([row], tmp_path / "one.svg")
    root = ET.parse(path).getroot()
    assert len(root.findall(f"{SVG}g/{SVG}circle")) == 1
    with pytest.raises(EmptyInput):
        emit_plot([], tmp_path / "none.svg")


def test_config_error_exit_and_no_partial_output(tmp_path, capsys):
    bad = small_config(tmp_path).read_text().replace("[0.0, 0.5]", "[0.0, 1.5]")
    (tmp_path / "bad.yaml").write_text(bad)
    out = tmp_path / "never"
    assert main(["sweep", "--config", str(tmp_path / "bad.yaml"), "--out", str(out)]) == 1
    assert "line 4" in capsys.readouterr().err
    assert not out.exists()


def test_failure_mid_run_removes_outputs(tmp_path, monkeypatch):
    import psc_auctions.plot as plot

    def boom(*a, **k):
        raise RuntimeError("disk full")

    monkeypatch.setattr(plot, "emit_plot", boom)
    out = tmp_path / "partial"
    with pytest.raises(RuntimeError):
        main(["sweep", "--config", str(small_config(tmp_path)), "--out", str(out)])
    assert not out.exists()


def test_pa_sweep_requires_pa_block(tmp_path):
    assert main(["pa-sweep", "--config", str(small_config(tmp_path)), "--out", str(tmp_path / "x")]) == 1


def test_pa_sweep_runs(tmp_path):
    cfg = small_config(tmp_path, "pa: {cost: quadratic, gamma: 1}\n")
    cfg.write_text(cfg.read_text().replace("example1", "example2_pa"))
    assert main(["pa-sweep", "--config", str(cfg), "--out", str(tmp_path / "pa")]) == 0
    labels = {r.contract for r in read_csv(tmp_path / "pa" / "sweep.csv")}
    assert labels == {"posc_pa", "plsc_pa"}
    man = json.loads((tmp_path / "pa" / "manifest.json").read_text())
    assert man["effort_cost"] == {"kind": "quadratic", "gamma": 1.0, "e_lo": 0.0, "e_hi": 1.0}


def test_bid_command(capsys):
    assert main(["bid", "--config", str(CONFIGS / "example1_sweep.yaml"), "--y1", "0.6", "--z", "0.3",
                 "--alpha", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["bid"] == pytest.approx(1 / 3, abs=1e-9)


def test_bid_command_config_errors(capsys):
    assert main(["bid", "--y1", "0.5"]) == 1
    assert main(["bid", "--config", str(CONFIGS / "example1_sweep.yaml"), "--y1", "0.5",
                 "--contract", "general"]) == 1


def test_bid_rejects_signals_outside_interval(capsys):
    assert main(["bid", "--config", str(CONFIGS / "example1_sweep.yaml"), "--y1", "0.5", "--z", "7"]) == 1
    assert main(["bid", "--config", str(CONFIGS / "example1_sweep.yaml"), "--y1", "0.5",
                 "--z", "0.2", "0.1"]) == 1


def test_numeric_failure_exit_code(capsys, monkeypatch):
    import psc_auctions.equilibrium as eq
    from psc_auctions.exceptions import BracketFailure

    def fail(*a, **k):
        raise BracketFailure("no sign change")

    monkeypatch.setattr(eq, "bid_sp", fail)
    code = main(["bid", "--config", str(CONFIGS / "example1_sweep.yaml"), "--y1", "0.5", "--z", "0.2"])
    assert code == 3
    assert "BracketFailure" in capsys.readouterr().err


def test_simulate_english(capsys):
    assert main(["simulate", "--config", str(CONFIGS / "common_value_english.yaml"), "--seed", "4",
                 "--alpha", "0.5"]) == 0
    trace = json.loads(capsys.readouterr().out)
    assert len(trace["drop_prices"]) == 2
    assert trace["clock_payment"] == pytest.approx(trace["auction_payment"], abs=1e-4)


def test_verify_fast(capsys):
    assert main(["verify", "--scope", "fast"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_verify_flags_tampered_contract():
    from psc_auctions import SharingContract
    from psc_auctions.verify import verify_suite

    steep = SharingContract.general([-1, 0, 1], [-1.5, 0, 1.5])
    report = verify_suite("fast", contracts=[steep])
    failed = [c.name for c in report.checks if not c.passed]
    assert len(failed) == 1 and "admissibility" in failed[0]
