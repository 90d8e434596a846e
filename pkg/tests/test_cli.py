import json
import subprocess
import sys

import pytest

from sparsity_lab import budget
from sparsity_lab.cli import main
from sparsity_lab.forms import SparseForm
from sparsity_lab.harness import GROWTH_COLUMNS, LEMMA_ALIASES, LEMMAS, build_config, growth_table
from sparsity_lab.records import dumps, parse_csv, parse_jsonl, render_csv
from sparsity_lab.errors import ConfigError


def run_cli(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main(["--out", str(out), *args])
    return code, (out.read_text() if out.exists() else "")


def test_count_squares_csv(tmp_path):
    code, text = run_cli(tmp_path, "count-squares", "c=1,1", "g=2", "K=10")
    assert code == 0
    config, cols, rows = parse_csv(text)
    assert cols == ["n", "n_squared", "k_1", "k_2"]
    assert len(rows) == 13
    assert config["mode"] == "count-squares" and config["params"]["K"] == 10
    assert rows == sorted(rows, key=lambda r: (int(r["n"]), int(r["k_1"]), int(r["k_2"])))
    for r in rows:
        assert int(r["n"]) ** 2 == int(r["n_squared"]) == 2 ** int(r["k_1"]) + 2 ** int(r["k_2"])


def test_count_jsonl_summary(tmp_path):
    code, text = run_cli(tmp_path, "--format", "jsonl", "count-sparse", "g=2", "m=2", "K=4")
    assert code == 0
    (rec,) = parse_jsonl(text)
    assert rec["count"] == 3 and rec["config"]["format"] == "jsonl"


def test_verify_lemma_product_formula(tmp_path):
    code, text = run_cli(tmp_path, "verify-lemma", "lemma=4.3", "ell=5", "r=7", "theta=2", "a=1")
    assert code == 0
    (rec,) = parse_jsonl(text)
    assert list(rec)[:6] == ["lemma", "params", "value", "bound", "ratio", "pass"]
    assert rec["pass"] is True and rec["lemma"] == "product-formula"
    assert rec["config"]["params"]["lemma"] == "4.3"


@pytest.mark.parametrize(
    "args",
    [
        ["lemma=diag-bound", "q=7", "d=2", "m=2", "samples=5"],
        ["lemma=twisted-bound", "q=7", "d=2", "a=1,3", "chi=2,5"],
        ["lemma=single-bound", "ell=7", "theta=2", "a=1,1"],
        ["lemma=product-bound", "ell=5", "r=7", "theta=2", "a=1"],
        ["lemma=incomplete-bound", "ell=23", "r=31", "theta=2", "a=1", "L=10"],
        ["lemma=korobov", "ell=31", "theta=3"],
        ["lemma=trivial-count", "c=1,1", "g=2", "K=3", "ell=3"],
        ["lemma=sieve-count", "c=1,1,1", "g=2", "K=12", "ell=23", "z=11", "alpha=0.5"],
    ],
)
def test_verify_lemma_suite(tmp_path, args):
    code, text = run_cli(tmp_path, "verify-lemma", *args)
    assert code == 0, text
    recs = parse_jsonl(text)
    assert recs and all(r["pass"] for r in recs)


def test_lemma_aliases_resolve():
    assert set(LEMMA_ALIASES.values()) <= set(LEMMAS)


def test_bound_failure_exit_code(tmp_path, capsys):
    code, text = run_cli(tmp_path, "example-21", "n=2")
    assert code == 2
    (rec,) = parse_jsonl(text)
    assert rec["pass"] is False
    assert list(rec)[:5] == ["n", "precision_bits", "deviation", "budget", "pass"]
    code, text = run_cli(tmp_path, "example-21", "n=3", "precision_bits=1024", name="b")
    assert code == 0 and parse_jsonl(text)[0]["pass"] is True


def test_config_errors(tmp_path, capsys):
    assert main(["count-squares", "c=1,1", "g=2", "K=10", "bogus=3"]) == 1
    assert "bogus" in capsys.readouterr().err
    assert main(["count-squares", "c=1,1", "g=2", "Kx"]) == 1
    assert "Kx" in capsys.readouterr().err
    assert main(["count-squares", "c=1,1", "g=2"]) == 1
    assert "'K'" in capsys.readouterr().err
    assert main(["nonsense"]) == 1
    assert main(["count-squares", "c=a", "g=2", "K=3"]) == 1
    assert main(["--format", "xml", "count-squares"]) == 1
    assert main([]) == 1
    assert main(["char-sum", "kind=quad", "q=5", "d=2", "a=1", "ell=7"]) == 1
    assert "ell" in capsys.readouterr().err


def test_workload_exit_code(tmp_path, monkeypatch):
    monkeypatch.delenv(budget.ENV_VAR, raising=False)
    assert main(["--budget", "10", "count-squares", "c=1,1", "g=2", "K=10"]) == 3
    monkeypatch.setenv(budget.ENV_VAR, "1000")
    code, text = run_cli(tmp_path, "--budget", "10", "count-squares", "c=1,1", "g=2", "K=10")
    assert code == 0
    assert parse_csv(text)[0]["budget"] == 1000


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# golden run\nmode=count-squares\nc=1,1  # coefficients\ng=2\nK=10\nseed=5\n")
    code, text = run_cli(tmp_path, "--config", str(cfg))
    assert code == 0
    config, _, rows = parse_csv(text)
    assert len(rows) == 13 and config["seed"] == 5
    # command-line keys override the file
    code, text = run_cli(tmp_path, "--config", str(cfg), "count-squares", "K=4", name="o2")
    assert parse_csv(text)[0]["params"]["K"] == 4
    cfg.write_text("mode=count-squares\nwhat=1\n")
    assert main(["--config", str(cfg)]) == 1


def test_all_modes_run(tmp_path):
    cases = [
        ["sieve", "g=2", "z=11", "alpha=0.5", "c1=3"],
        ["count-sparse", "g=10", "m=1", "K=3"],
        ["char-sum", "kind=quad", "q=7", "d=2", "a=1,1"],
        ["char-sum", "kind=twisted", "q=5", "d=2", "a=1,1", "chi=1,0"],
        ["char-sum", "kind=single", "ell=7", "theta=2", "a=1,1"],
        ["char-sum", "kind=product", "ell=5", "r=7", "theta=2", "a=1", "b=5"],
        ["char-sum", "kind=incomplete", "ell=23", "r=31", "theta=2", "a=1", "L=10"],
        ["char-sum", "kind=korobov", "ell=7", "theta=2", "a=1"],
        ["char-sum", "kind=t-count", "c=1,1", "g=2", "K=3", "ell=3"],
        ["approx-search", "q=0,0,1", "lam=2", "c=1,1", "N=20"],
        ["approx-search", "q=0,1", "lam=2", "c=1", "B=1/2", "N=8"],
        ["sieve-stats", "c=1,1", "g=2", "K=10", "z=11", "alpha=0.5", "c1=3"],
        ["growth-table", "c=1,1", "g=2", "N_grid=20,100,500"],
    ]
    for i, args in enumerate(cases):
        code, text = run_cli(tmp_path, *args, name=f"o{i}")
        assert code == 0, args
        parse_csv(text)


def test_mode_outputs(tmp_path):
    _, text = run_cli(tmp_path, "sieve", "g=2", "z=11", "alpha=0.5", "c1=3")
    assert [r["ell"] for r in parse_csv(text)[2]] == ["23", "31"]
    _, text = run_cli(tmp_path, "approx-search", "q=0,0,1", "lam=2", "c=1,1", "N=20", name="a")
    _, cols, rows = parse_csv(text)
    assert cols == ["n", "k_1", "k_2", "residual"]
    assert sorted({int(r["n"]) for r in rows}) == [2, 3, 4, 6, 8, 12, 16]
    _, text = run_cli(tmp_path, "sieve-stats", "c=1,1", "g=2", "K=10", "z=11", "alpha=0.5", "c1=3", name="s")
    row = parse_csv(text)[2][0]
    assert (row["M"], row["W"], row["U"], row["V"]) == ("13", "252", "242", "10")


def test_growth_table():
    rows = growth_table(SparseForm(2, (1, 1)), [20])
    assert rows[0].count == 7 and rows[0].log_m_gamma is None
    rows = growth_table(SparseForm(2, (1, 1)), [20, 100, 500])
    counts = [r.count for r in rows]
    assert counts == sorted(counts)
    assert growth_table(SparseForm(2, (1, 1)), []) == []
    r3 = growth_table(SparseForm(2, (1, 1, 1)), [50])[0]
    assert r3.ratio_gamma == pytest.approx(r3.count / r3.log_m_gamma)
    with pytest.raises(ConfigError):
        growth_table(SparseForm(2, (1, 1)), [100, 20])


def test_growth_table_empty_grid_cli(tmp_path):
    code, text = run_cli(tmp_path, "growth-table", "c=1,1", "g=2", "N_grid=")
    assert code == 0
    _, cols, rows = parse_csv(text)
    assert cols == GROWTH_COLUMNS and rows == []


def test_byte_identical_reruns(tmp_path):
    for args in (
        ["growth-table", "c=1,1,1", "g=2", "N_grid=20,100"],
        ["verify-lemma", "lemma=diag-bound", "q=11", "d=4", "m=3", "samples=4"],
        ["sieve-stats", "c=1,1", "g=2", "K=10", "z=11", "alpha=0.5", "c1=3"],
    ):
        a = run_cli(tmp_path, *args, name="x")[1]
        b = run_cli(tmp_path, *args, name="y")[1]
        assert a == b and a
        assert (tmp_path / "x").read_bytes() == (tmp_path / "y").read_bytes()
    # different seeds sample different coefficient vectors
    a = run_cli(tmp_path, "--seed", "1", "verify-lemma", "lemma=diag-bound", "q=11", "d=2", "m=2", name="s1")[1]
    b = run_cli(tmp_path, "--seed", "2", "verify-lemma", "lemma=diag-bound", "q=11", "d=2", "m=2", name="s2")[1]
    assert a != b


def test_float_format():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(2.0) == "2.0"
    assert dumps(float("nan")) == "null"
    assert dumps({"b": 1, "a": [1.5, None, True]}) == '{"b":1,"a":[1.5,null,true]}'
    text = render_csv(["x", "y"], [{"x": 1 / 3, "y": True}], {"mode": "t"})
    assert text.endswith("0.33333333333333331,true\n")
    assert "\r" not in text
    json.loads(text.splitlines()[0][len("# config: "):])


def test_build_config_defaults():
    cfg = build_config("sieve", {"g": "2", "z": "11"})
    assert cfg.params["alpha"] == 0.677 and cfg.params["c1"] == 2.0
    assert cfg.output_format == "csv"
    assert build_config("example-21", {"n": "3"}).output_format == "jsonl"
    with pytest.raises(ConfigError):
        build_config("sieve", {"mode": "count-squares", "g": "2", "z": "11"})


def test_console_script_subprocess(tmp_path):
    out = tmp_path / "o.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "sparsity_lab.cli", "--out", str(out), "count-squares", "c=1,1", "g=2", "K=10"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(parse_csv(out.read_text())[2]) == 13
