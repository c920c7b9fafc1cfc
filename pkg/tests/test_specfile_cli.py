import json
import subprocess
import sys

import pytest

from lrkm.cli import CSV_HEADER, main
from lrkm.errors import SpecError
from lrkm.specfile import build, parse_grid, parse_specfile, render_specfile

MINIMAL = """\
[problem]
alpha = 1.5
beta = 0.5
theta = 0.4
a0 = 0
a1 = 0
a2 = 1
g = xi

[solver]
m = 4
n = 2
"""


def write(tmp_path, text, name="p.spec"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------ spec files


def test_defaults_applied():
    sf = parse_specfile(MINIMAL)
    spec, cfg = build(sf)
    assert spec.boundary_values == (0, 0, 0)
    assert float(cfg.node_offset) == 0.3 and cfg.gs_drop_tol == 1e-12
    assert len(cfg.grid) == 11 and float(cfg.grid[-1]) == 1.0


@pytest.mark.parametrize(
    "text, key, line",
    [
        (MINIMAL.replace("g = xi", "gg = xi"), "gg", 8),
        (MINIMAL.replace("n = 2", "n = 2\nm = 5"), "m", 13),
        (MINIMAL.replace("theta = 0.4", "theta = 1.5"), "theta", 4),
        (MINIMAL.replace("a1 = 0", "a1 = xi +"), "a1", 6),
        (MINIMAL.replace("a1 = 0", "a1 = foo"), "a1", 6),
        (MINIMAL.replace("alpha = 1.5", "alpha = abc"), "alpha", 2),
        (MINIMAL.replace("m = 4", "m = 2"), "m", 11),
        (MINIMAL.replace("a1 = 0", "a1 = z"), "a1", 6),
    ],
)
def test_errors_name_key_and_line(text, key, line):
    with pytest.raises(SpecError) as info:
        build(parse_specfile(text))
    assert info.value.key == key and info.value.line == line
    assert f"key '{key}'" in str(info.value) and f"line {line}" in str(info.value)


def test_structural_errors():
    with pytest.raises(SpecError, match="section"):
        parse_specfile("[extra]\n")
    with pytest.raises(SpecError, match="outside"):
        parse_specfile("alpha = 1.5\n")
    with pytest.raises(SpecError, match="empty"):
        parse_specfile("[problem]\nalpha =\n")
    with pytest.raises(SpecError, match="missing"):
        build(parse_specfile(MINIMAL.replace("a0 = 0\n", "")))


def test_mode_rules():
    with pytest.raises(SpecError, match="nonlinear"):
        build(parse_specfile(MINIMAL.replace("g = xi", "g = xi\nnonlinear = z")))
    manufactured = MINIMAL.replace("g = xi", "mode = manufactured\nexact_coeffs = 1, 2")
    spec, _ = build(parse_specfile(manufactured))
    assert [float(v) for v in spec.boundary_values] == pytest.approx([1, 1.8, 3])
    with pytest.raises(SpecError, match="gamma0"):
        build(parse_specfile(manufactured.replace("a0 = 0", "a0 = 0\ngamma0 = 5")))
    with pytest.raises(SpecError, match="exact_coeffs"):
        build(parse_specfile(MINIMAL.replace("g = xi", "mode = manufactured")))


def test_grid_parsing():
    grid = parse_grid("0:1:0.25")
    assert [float(x) for x in grid] == [0, 0.25, 0.5, 0.75, 1]
    assert len(parse_grid("0:1:0.1")) == 11
    with pytest.raises(SpecError):
        parse_grid("0:1")
    with pytest.raises(SpecError):
        parse_grid("0:1:0")


def test_echo_round_trip(specs_dir):
    from lrkm.specfile import load_specfile

    sf = load_specfile(specs_dir / "cubic.spec").override("solver", "n", 3)
    again = parse_specfile(render_specfile(sf.echo()))
    assert again.echo() == sf.echo()
    build(again)


# ------------------------------------------------------------------- cli


def test_solve_csv_example_quadratic(specs_dir, capsys):
    code, out, _ = run(["solve", str(specs_dir / "quadratic.spec"), "--m", "5", "--n", "9", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == CSV_HEADER
    x, exact, approx, err = lines[2].split(",")
    assert x == "0.1" and exact.startswith("0.036") and float(err) <= 1e-10


def test_solve_zero_problem(specs_dir, capsys):
    code, out, _ = run(["solve", str(specs_dir / "zero.spec"), "--format", "csv"], capsys)
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert all(r[2] == "0.0" and r[1] == "" and r[3] == "" for r in rows)


def test_solve_table_columns(specs_dir, capsys):
    code, out, _ = run(["solve", str(specs_dir / "quadratic.spec")], capsys)
    assert code == 0
    header = [c.strip() for c in out.splitlines()[0].split("|")]
    assert header == ["x", "Exact Sol.", "Approximate Sol.", "Absolute Error"]
    code, out, _ = run(["solve", str(specs_dir / "zero.spec")], capsys)
    assert [c.strip() for c in out.splitlines()[0].split("|")] == ["x", "Approximate Sol."]


def test_bad_theta_exit_2(tmp_path, capsys):
    path = write(tmp_path, MINIMAL.replace("theta = 0.4", "theta = 1.5"))
    code, _, err = run(["solve", path], capsys)
    assert code == 2 and "theta" in err and "0 < theta < 1" in err


def test_numerical_failure_exit_3(tmp_path, capsys):
    path = write(tmp_path, MINIMAL.replace("g = xi", "g = ln(xi - 0.5)"))
    code, _, err = run(["solve", path], capsys)
    assert code == 3 and "node" in err


def test_missing_file_exit_2(tmp_path, capsys):
    code, _, _ = run(["solve", str(tmp_path / "nope.spec")], capsys)
    assert code == 2


def test_json_report(specs_dir, tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["solve", str(specs_dir / "cubic.spec"), "--format", "json", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["wall_time_s"] is None
    res = doc["result"]
    assert res["iterations"] == 9 and len(res["iterates_delta"]) == 9
    assert res["dropped"] == [3] and len(res["rows"]) == 11
    assert res["max_abs_error"] == max(r["abs_error"] for r in res["rows"])
    sf = parse_specfile(render_specfile(doc["input"]["config"]))
    build(sf)
    code, _, _ = run(["solve", str(specs_dir / "cubic.spec"), "--format", "json", "--timing"], capsys)
    assert code == 0


def test_csv_deterministic(specs_dir, capsys):
    argv = ["solve", str(specs_dir / "cubic.spec"), "--format", "csv"]
    outputs = {run(argv, capsys)[1] for _ in range(3)}
    assert len(outputs) == 1


def test_sweep_matches_solve(specs_dir, tmp_path, capsys):
    spec = str(specs_dir / "quadratic.spec")
    code, out, _ = run(["sweep", spec, "--alpha-list", "2,1.8", "--beta-list", "1,0.8", "--m", "3", "--n", "5", "--format", "csv"], capsys)
    assert code == 0
    sweep = [line.split(",") for line in out.splitlines()]
    assert sweep[0] == ["x", "alpha=2 beta=1", "alpha=1.8 beta=0.8"]
    for col, (a, b) in enumerate((("2", "1"), ("1.8", "0.8")), start=1):
        path = specs_dir / "quadratic.spec"
        text = path.read_text().replace("alpha = 1.75", f"alpha = {a}").replace("beta = 0.75", f"beta = {b}")
        solo = write(tmp_path, text, f"solo{col}.spec")
        _, solo_out, _ = run(["solve", solo, "--m", "3", "--n", "5", "--format", "csv"], capsys)
        solo_rows = [line.split(",") for line in solo_out.splitlines()[1:]]
        assert [r[col] for r in sweep[1:]] == [r[3] for r in solo_rows]


def test_sweep_failures_inline(specs_dir, capsys):
    code, out, _ = run(["sweep", str(specs_dir / "quadratic.spec"), "--alpha-list", "1.75,2.5", "--beta-list", "0.75,0.5"], capsys)
    assert code == 3
    assert "FAILED alpha=2.5 beta=0.5" in out and "alpha must satisfy" in out


def test_sweep_length_mismatch(specs_dir, capsys):
    code, _, err = run(["sweep", str(specs_dir / "quadratic.spec"), "--alpha-list", "2,1.9", "--beta-list", "1"], capsys)
    assert code == 2 and "beta-list" in err


def test_sweep_theta_rows_zero(specs_dir, capsys):
    code, out, _ = run(["sweep", str(specs_dir / "quadratic.spec"), "--alpha-list", "2,1.9,1.8,1.7,1.6", "--beta-list", "1,0.9,0.8,0.7,0.6", "--m", "3", "--n", "3", "--format", "json"], capsys)
    doc = json.loads(out)
    i = doc["grid"].index(0.5)
    assert all(c["values"][i] <= 1e-12 for c in doc["cells"])


def test_verify_suite_exit_codes(capsys):
    code, out, _ = run(["verify", "--suite", "fracops"], capsys)
    assert code == 0 and "caputo oracle agreement" in out
    code, out, _ = run(["verify", "--suite", "fracops", "--inject-fault", "gamma"], capsys)
    assert code == 1 and "FAIL  fracops: gamma accuracy" in out


def test_module_entry_point(specs_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "lrkm", "solve", str(specs_dir / "zero.spec"), "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith(CSV_HEADER)
