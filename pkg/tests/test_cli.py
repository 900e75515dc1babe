import json

import pytest

from homometry.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_rs(capsys):
    code, out, _ = run(capsys, "gen", "--system", "rs", "--lo", "0", "--hi", "7")
    assert code == 0
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == "index,weight"
    assert [int(r.split(",")[1]) for r in rows[1:]] == [1, 1, 1, -1, 1, 1, -1, 1]


def test_gen_echoes_seed(capsys):
    _, out, _ = run(capsys, "gen", "--system", "bernoulli", "--n", "4", "--seed", "17")
    assert "seed=17" in out.splitlines()[0]


def test_unknown_system(capsys):
    code, _, err = run(capsys, "gen", "--system", "thue-morse")
    assert code == 2 and "valid names" in err and "ledrappier" in err


def test_invalid_probability(capsys):
    code, _, err = run(capsys, "gen", "--system", "bernoulli", "--p", "1.5")
    assert code == 2


def test_help_lists_systems(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for name in ("bernoulli", "rs2d", "dimer-factor", "visible", "meyer"):
        assert name in out


def test_subcommand_help_shows_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["spectrum", "--help"])
    assert "default: 64" in capsys.readouterr().out


def test_spectrum_dimer(tmp_path, capsys):
    out = tmp_path / "dimer.csv"
    code, _, _ = run(capsys, "spectrum", "--system", "dimer", "--n", "65536", "--blocks", "64", "--out", str(out))
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "k,density" and len(rows) - 1 == 256
    assert float(rows[1].split(",")[1]) <= 0.05
    assert (tmp_path / "dimer.peaks.csv").exists()


def test_outputs_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "spectrum", "--system", "bernoullised-rs", "--n", "4096", "--blocks", "4", "--p", "0.3",
            "--seed", "5", "--format", "json", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.json", tmp_path / "d.json"
    for p in (c, d):
        run(capsys, "experiment", "--name", "meyer", "--n", "4096", "--seeds", "2", "--out", str(p))
    assert c.read_bytes() == d.read_bytes()


def test_autocorr_and_entropy(capsys):
    code, out, _ = run(capsys, "autocorr", "--system", "rs", "--n", "1024", "--max-lag", "3")
    assert code == 0 and out.splitlines()[1] == "lag,eta"
    code, out, _ = run(capsys, "autocorr", "--system", "ledrappier", "--width", "32", "--height", "32",
                       "--max-lag", "2")
    assert code == 0 and "lag1,lag2,eta" in out
    code, out, _ = run(capsys, "autocorr", "--system", "visible", "--radius", "20", "--max-lag", "2")
    assert code == 0
    code, out, err = run(capsys, "entropy", "--system", "ledrappier", "--max-l", "3", "--samples", "2000")
    assert code == 0 and "rank1" in err
    code, out, _ = run(capsys, "entropy", "--system", "dimer", "--n", "65536", "--max-l", "6")
    assert code == 0 and out.splitlines()[1] == "L,H_L,rate"


def test_experiment_bernoullisation(tmp_path, capsys):
    out = tmp_path / "b.json"
    code, text, _ = run(capsys, "experiment", "--name", "bernoullisation", "--n", "65536", "--seeds", "8",
                        "--out", str(out))
    d = json.loads(out.read_text())
    assert code == 0 and d["pass"] is True and d["name"] == "bernoullisation"
    assert set(d) == {"name", "params", "metrics", "seeds", "pass"}
    assert d["seeds"] == list(range(8))
    assert "PASS" in text


def test_experiment_failure_exit_code(capsys):
    code, text, _ = run(capsys, "experiment", "--name", "dimer", "--n", "4096", "--seeds", "1")
    assert code == 1 and "FAIL" in text


def test_compare(tmp_path, capsys):
    rs = tmp_path / "rs.csv"
    run(capsys, "spectrum", "--system", "rs", "--n", "65536", "--blocks", "64", "--out", str(rs))
    code, out, _ = run(capsys, "compare", "--estimate", str(rs), "--reference", "rs")
    assert code == 0 and "acLinf" in out

    const = tmp_path / "const.json"
    run(capsys, "spectrum", "--system", "bernoulli", "--p", "1", "--n", "4096", "--blocks", "1",
        "--format", "json", "--out", str(const))
    code, out, _ = run(capsys, "compare", "--estimate", str(const), "--reference", "bernoulli", "--p", "1")
    pp = float(out.splitlines()[1].split()[1])
    assert pp <= 1e-9


def test_compare_dimer_factor(tmp_path, capsys):
    f = tmp_path / "y.json"
    run(capsys, "spectrum", "--system", "dimer-factor", "--n", "65536", "--blocks", "64", "--format", "json",
        "--out", str(f))
    code, out, _ = run(capsys, "compare", "--estimate", str(f), "--reference", "dimer-factor", "--ac-tol", "0.3")
    assert code == 0


def test_compare_missing_file(capsys):
    code, _, _ = run(capsys, "compare", "--estimate", "/nonexistent.csv", "--reference", "rs")
    assert code == 2
