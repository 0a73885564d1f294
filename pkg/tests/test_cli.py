import pytest

from fracsav import __version__
from fracsav.cli import ConfigError, main, parse_config, parse_config_text, resolve
from fracsav.io import read_csv


def test_valid_example_config():
    cfg = parse_config(["converge", "--alpha", "0.5", "--scheme", "l1cn", "--mesh", "graded",
                        "--r", "2", "--M", "64,128"])
    assert cfg.alpha == 0.5 and cfg.mesh == "graded" and cfg.r == 2.0 and cfg.M == (64, 128)
    assert cfg.theta == cfg.eps2 == 1.0 and cfg.c0 == 0.0 and cfg.bc == "periodic"


@pytest.mark.parametrize("argv, needle", [
    (["converge", "--theta", "2", "--eps2", "1"], "theta"),
    (["converge", "--alpha", "1.5"], "alpha"),
    (["converge", "--r", "0.5"], "r must be"),
    (["converge", "--alpha", "abc"], "number"),
    (["converge", "--M", "1,x"], "comma-separated"),
    (["converge", "--problem", "ex2", "--bc", "periodic"], "bc"),
    (["coarsen", "--dt", "0.3"], "integer"),
])
def test_rejections(argv, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(argv)


def test_config_file_and_override(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nalpha = 0.3\nscheme = l1\nM = 8,16\n")
    cfg = parse_config(["converge", "--config", str(path), "--alpha", "0.7"])
    assert cfg.alpha == 0.7 and cfg.scheme == "l1" and cfg.M == (8, 16)
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text("gamma = 3\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config_text("alpha 3\n")


@pytest.mark.parametrize("argv", [
    ["converge"], ["circle", "--alpha", "0.9"], ["coarsen", "--seed", "4"],
    ["single-run", "--problem", "ex3", "--mesh", "graded", "--r", "2.5", "--M", "40"],
])
def test_canonical_round_trip(argv):
    cfg = parse_config(argv)
    text = cfg.canonical()
    again = resolve(parse_config_text(text))
    assert again == cfg
    assert again.canonical() == text


def test_converge_writes_csv(tmp_path, capsys):
    out = tmp_path / "conv.csv"
    code = main(["converge", "--problem", "ex1", "--scheme", "l1", "--grid", "8",
                 "--M", "8,16,32", "--out", str(out)])
    assert code == 0
    assert "lsq order" in capsys.readouterr().out
    header, columns, rows = read_csv(out)
    assert columns == ["M", "tau_max", "error", "order"]
    assert header[0] == f"fracsav {__version__}"
    assert "alpha = 0.5" in header
    assert [r[0] for r in rows] == [8, 16, 32]
    line = out.read_text().splitlines()[-1]
    assert len(line.split(",")[2].replace(".", "").lstrip("0").split("e")[0]) >= 12


def test_coarsen_is_deterministic(tmp_path):
    args = ["coarsen", "--alpha", "0.6", "--grid", "16", "--T", "1.5", "--dt", "0.1",
            "--M", "5", "--seed", "9"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes().replace(b"a.csv", b"") == b.read_bytes().replace(b"b.csv", b"")
    assert (tmp_path / "a_t0.csv").exists()


def test_circle_and_single_run(tmp_path, capsys):
    out = tmp_path / "circ.csv"
    assert main(["circle", "--alpha", "1", "--grid", "32", "--T", "2", "--dt", "0.1",
                 "--M", "10", "--out", str(out)]) == 0
    assert "R(2)" in capsys.readouterr().out
    _, columns, _ = read_csv(out)
    assert columns == ["t", "R", "R2"]
    _, columns, _ = read_csv(tmp_path / "circ_energy.csv")
    assert columns == ["step", "t", "E", "E_mod", "R"]
    out = tmp_path / "single.csv"
    assert main(["single-run", "--problem", "ex2", "--grid", "16", "--M", "16",
                 "--out", str(out)]) == 0
    assert "final error" in capsys.readouterr().out


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["converge", "--alpha", "2"]) == 2
    assert "alpha" in capsys.readouterr().err
    bad = tmp_path / "missing" / "x.csv"
    assert main(["single-run", "--grid", "8", "--M", "4", "--out", str(bad)]) == 1
    assert "fracsav: error" in capsys.readouterr().err
    # cos(4 pi x) cos(4 pi y) is exactly +-1 on this grid, so E_theta = 0 with theta = 0
    assert main(["single-run", "--problem", "ex3", "--grid", "8", "--M", "2", "--eps2", "1",
                 "--theta", "0", "--out", str(tmp_path / "ok.csv")]) == 1
    assert "increase C0" in capsys.readouterr().err
