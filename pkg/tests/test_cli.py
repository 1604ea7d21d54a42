import csv
import io
from pathlib import Path

import pytest

from ggcport import cli
from ggcport.cli import ConfigError, main, parse_config, serialize
from ggcport.portfolio import optimal_portfolio

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
GOLDEN = sorted(CONFIGS.glob("*.toml"))

BASE = """\
command = "{command}"

[output]
path = "{out}"

[market]
r_f = 0.01

[model]
mu = [0.05, 0.08]
gamma = [0.1, -0.05]
a_matrix = [[0.2, 0.05], [0.05, 0.3]]

[law]
kind = "gig"
lambda = {lam}
a = 1.0
b = 2.0
"""


def write_config(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def invoke(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# -- config parsing ----------------------------------------------------------


def test_golden_configs_present():
    assert {p.stem for p in GOLDEN} == set(cli.COMMANDS)


@pytest.mark.parametrize("path", GOLDEN, ids=lambda p: p.stem)
def test_golden_round_trip(path):
    text = path.read_text()
    assert serialize(parse_config(text)) == text


def test_invalid_shape_reports_field_path():
    doc = """\
command = "mean"

[law]
kind = "gamma_convolution"
components = [{alpha = -1.0, beta = 1.0}]
"""
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert any(e.startswith("law.components[0].alpha:") for e in info.value.errors)


def test_unknown_key_rejected():
    doc = BASE.format(command="optimize", out="x.csv", lam=1.0) + "bogus = 1\n"
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert any("law.bogus" in e for e in info.value.errors)


def test_missing_section_named():
    with pytest.raises(ConfigError, match="market: section required"):
        parse_config('command = "optimize"\n[law]\nkind = "gig"\nlambda = 1.0\na = 1.0\nb = 1.0\n')


def test_non_spd_matrix_rejected():
    doc = BASE.format(command="optimize", out="x.csv", lam=1.0).replace("[[0.2, 0.05], [0.05, 0.3]]", "[[1.0, 2.0], [2.0, 1.0]]")
    with pytest.raises(ConfigError, match="model.a_matrix"):
        parse_config(doc)


def test_syntax_error_has_position():
    with pytest.raises(ConfigError) as info:
        parse_config('command = "mean"\n[law\n')
    assert "line 2" in info.value.errors[0]


# -- exit codes and outputs --------------------------------------------------


def test_unknown_command_exits_2_without_output(tmp_path, capsys):
    out = tmp_path / "out.csv"
    cfg = write_config(tmp_path, BASE.format(command="launch", out=out, lam=1.0))
    code, stdout, err = invoke(capsys, "--config", cfg)
    assert code == 2
    assert "command" in err and stdout == ""
    assert list(tmp_path.iterdir()) == [cfg]


def test_missing_output_path_exits_2(tmp_path, capsys):
    text = BASE.format(command="optimize", out="", lam=1.0).replace('[output]\npath = ""\n', "")
    cfg = write_config(tmp_path, text)
    code, _, err = invoke(capsys, "--config", cfg)
    assert code == 2 and "output.path" in err


def test_optimize_matches_library(tmp_path, capsys, canonical_model, canonical_market):
    out = tmp_path / "opt.csv"
    cfg = write_config(tmp_path, BASE.format(command="optimize", out=out, lam=1.0))
    code, stdout, _ = invoke(capsys, "--config", cfg)
    assert code == 0
    assert stdout.startswith("status=ok command=optimize")
    row = next(csv.DictReader(io.StringIO(out.read_text())))
    sol = optimal_portfolio(canonical_model, canonical_market)
    assert float(row["q_min"]) == sol.q_min
    assert [float(row["x_0"]), float(row["x_1"])] == sol.x_star.tolist()
    assert row["regular"] == "true"


def test_sweep_golden_config(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = invoke(capsys, "--config", CONFIGS / "sweep.toml", "--out", out)
    assert code == 0 and "failed=none" in stdout
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0][:3] == ["n", "EZ_n", "s_hat_n"]
    assert len(rows) == 1 + 12
    text = tmp_path / "sweep.txt"
    assert invoke(capsys, "--config", CONFIGS / "sweep.toml", "--out", text, "--format", "text")[0] == 0
    assert "check (vi) q_min: pass" in text.read_text()


@pytest.mark.parametrize("path", GOLDEN, ids=lambda p: p.stem)
def test_repeat_runs_are_byte_identical(tmp_path, capsys, path):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert invoke(capsys, "--config", path, "--out", a)[0] == 0
    assert invoke(capsys, "--config", path, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_override_changes_samples(tmp_path, capsys):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    sample = CONFIGS / "sample.toml"
    invoke(capsys, "--config", sample, "--out", a)
    invoke(capsys, "--config", sample, "--out", b, "--seed", "8")
    invoke(capsys, "--config", sample, "--out", c, "--seed", "7")
    assert a.read_bytes() != b.read_bytes()
    assert a.read_bytes() == c.read_bytes()


def test_domain_error_exits_1_without_partial_file(tmp_path, capsys):
    # lambda = -10 makes the true model irregular, so the sweep has no reference portfolio
    text = (CONFIGS / "sweep.toml").read_text().replace("lambda = 1.0", "lambda = -10.0")
    cfg = write_config(tmp_path, text)
    code, stdout, err = invoke(capsys, "--config", cfg, "--out", tmp_path / "sweep.csv")
    assert code == 1
    assert err.startswith("error: IrregularModelError") and stdout == ""
    assert list(tmp_path.iterdir()) == [cfg]


def test_divergent_laplace_is_reported_not_raised(tmp_path, capsys):
    out = tmp_path / "lap.csv"
    # s_hat = -2 for this law
    cfg = write_config(tmp_path, BASE.format(command="laplace", out=out, lam=1.0) + "\n[query]\ns = [-5.0]\n")
    assert invoke(capsys, "--config", cfg)[0] == 0
    assert out.read_text().splitlines()[1] == "-5,inf"


def test_laplace_and_density_values(tmp_path, capsys):
    from ggcport.mixing import Gig, exact_pdf, laplace

    law = Gig(1.0, 1.0, 2.0)
    out = tmp_path / "lap.csv"
    cfg = write_config(tmp_path, BASE.format(command="laplace", out=out, lam=1.0) + "\n[query]\ns = [0.5, -1.0]\n")
    assert invoke(capsys, "--config", cfg)[0] == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [float(r["laplace"]) for r in rows] == [laplace(law, 0.5), laplace(law, -1.0)]
    out = tmp_path / "dens.txt"
    cfg = write_config(tmp_path, BASE.format(command="density", out=out, lam=1.0) + "\n[query]\nx = [0.5]\n", "d.toml")
    assert invoke(capsys, "--config", cfg, "--format", "text")[0] == 0
    header, row = out.read_text().splitlines()
    assert header == "x pdf cdf"
    assert float(row.split()[1]) == float(exact_pdf(law, 0.5))


def test_missing_config_file_exits_2(tmp_path, capsys):
    assert invoke(capsys, "--config", tmp_path / "nope.toml")[0] == 2


def test_bad_flag_exits_2(capsys):
    assert invoke(capsys, "--config", "x.toml", "--format", "xml")[0] == 2
