import pytest

from ltgf.cli import main
from ltgf.simulator import COLUMNS, read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["simulate", "--trials", "many"])
    assert e.value.code == 1


def test_missing_out_is_usage_error(capsys):
    code, _, err = run(capsys, "simulate", "--trials", "1")
    assert code == 1 and "--out" in err


def test_bad_field_is_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--q", "6", "--trials", "1", "--out", str(tmp_path / "x.csv"))
    assert code == 1 and "prime power" in err


def test_simulate_writes_csv(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "simulate", "--q", "8,16", "--dist", "raptor", "--trials", "5",
                     "--eps-max", "0.02", "--out", str(out), "--plot", str(tmp_path / "r.gp"),
                     "--figure", str(tmp_path / "r.png"))
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 6 and {r.trials for r in rows} == {5}
    assert (tmp_path / "r.gp").exists() and (tmp_path / "r.png").exists()


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# small run\nq = 4\ndist = robust:0.01\ntrials = 3\neps_max = 0.01\n"
                   f"out = {tmp_path / 'c.csv'}\n")
    code, _, _ = run(capsys, "simulate", "--config", str(cfg), "--trials", "2")
    assert code == 0
    rows = read_csv(tmp_path / "c.csv")
    assert len(rows) == 2 and rows[0].trials == 2 and rows[0].q == 4


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 1 and "colour" in err


def test_ci_preset(capsys, tmp_path):
    out = tmp_path / "ci.csv"
    code, _, _ = run(capsys, "simulate", "--ci", "--q", "32", "--dist", "raptor", "--eps-max", "0",
                     "--out", str(out))
    assert code == 0 and read_csv(out)[0].trials == 1000


def test_analytic_csv(capsys, tmp_path):
    out = tmp_path / "a.csv"
    code, _, _ = run(capsys, "analytic", "--k", "100", "--q", "2,4", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS) and len(lines) == 13
    assert lines[1].startswith("random-linear-analytic,2,100,0,100,0,0,0.711212")


def test_dist_dump(capsys):
    code, out, _ = run(capsys, "dist", "dump", "--name", "ideal", "--k", "3")
    assert code == 0
    assert out.splitlines() == ["1 0.333333333", "2 0.500000000", "3 0.166666667"]


def test_dist_dump_novel(capsys):
    code, out, _ = run(capsys, "dist", "dump", "--name", "novel", "--q", "4")
    assert code == 0 and [l.split()[0] for l in out.splitlines()] == ["1", "2", "3", "4"]


def test_roundtrip_ok(capsys, tmp_path):
    pk = tmp_path / "p.txt"
    code, out, _ = run(capsys, "roundtrip", "--k", "100", "--q", "16", "--dist", "robust", "--n", "130",
                       "--seed", "1", "--symbol-len", "4", "--packets", str(pk))
    assert code == 0
    assert "verdict: success" in out and "symbol mismatches: 0" in out
    assert len(pk.read_text().splitlines()) == 130


def test_roundtrip_failure_is_reported(capsys):
    code, out, _ = run(capsys, "roundtrip", "--k", "20", "--q", "2", "--dist", "ideal", "--n", "10",
                       "--seed", "0", "--decoder", "bp")
    assert code == 0
    assert "verdict: bp-stall" in out and "symbol mismatches: -" in out


def test_roundtrip_square_needs_enough_rows(capsys):
    code, _, _ = run(capsys, "roundtrip", "--k", "20", "--q", "4", "--dist", "random-linear", "--n", "10",
                     "--seed", "0", "--decoder", "square")
    assert code == 1
