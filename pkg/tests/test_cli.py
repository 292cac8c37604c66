import subprocess
import sys

import pytest

from conftest import FIXTURES, VALID_SPACES
from urysohn.cli import main
from urysohn.dyadic import Dyadic
from urysohn.metricio import load_space
from urysohn.space import Store

PNG_MAGIC = b"\x89PNG"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def table(out):
    return [line.split("\t") for line in out.splitlines()]


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", FIXTURES / "spaces" / "tree.metric")
    assert code == 0
    assert out.startswith("ok\t") and out.rstrip().endswith("5 points")
    code, out, _ = run(capsys, "validate", FIXTURES / "spaces" / "single.metric")
    assert out.rstrip().endswith("1 point")


@pytest.mark.parametrize(
    "name, code, kind",
    [
        ("triangle", 1, "MetricViolation"),
        ("zero_distance", 1, "MetricViolation"),
        ("bad_literal", 2, "ParseError"),
        ("no_header", 2, "ParseError"),
    ],
)
def test_validate_failures(capsys, name, code, kind):
    got, out, err = run(capsys, "validate", FIXTURES / "invalid" / f"{name}.metric")
    assert got == code and out == ""
    assert err.startswith(f"error: {kind}: ")


def test_missing_file_is_a_usage_error(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "absent.metric")
    assert code == 2 and err.startswith("error: ")


@pytest.mark.parametrize("path", VALID_SPACES, ids=lambda p: p.stem)
def test_embed_then_dist_reproduces_the_matrix(capsys, path):
    code, out, _ = run(capsys, "embed", path)
    assert code == 0
    rows = table(out)
    assert rows[0] == ["index", "label", "encoding"]
    placed = [(label, enc) for _, label, enc in rows[1:]]
    X = load_space(path)
    for x, ex in placed:
        for y, ey in placed:
            code, out, _ = run(capsys, "dist", ex, ey)
            assert code == 0
            assert Dyadic.parse(out.strip()) == X.dist(x, y)


def test_embed_skips_absent_indices(capsys):
    code, out, _ = run(capsys, "embed", FIXTURES / "spaces" / "gapped_enumeration.metric")
    assert [r[:2] for r in table(out)[1:]] == [["0", "u"], ["2", "v"], ["3", "u"], ["5", "w"]]


def test_embed_upto(capsys):
    code, out, _ = run(capsys, "embed", FIXTURES / "spaces" / "tree.metric", "--upto", 2)
    assert code == 0 and len(table(out)) == 3


def test_dist_examples(capsys):
    assert run(capsys, "dist", "(0)", "(1, 2/2^0, 0, 1)")[1] == "2/2^0\n"
    assert run(capsys, "dist", "(0)", "(0)")[1] == "0/2^0\n"
    # tuples that are not points still have a distance
    bad = "(1, 1/2^0, 0, 1, 3/2^0, 0, 1)"
    assert run(capsys, "dist", bad, bad)[1] == "2/2^0\n"


@pytest.mark.parametrize(
    "argv, code, kind",
    [
        (["dist", "(0)", "(1, 2, 0, 1)"], 2, "MalformedEncoding"),
        (["dist", "(0)", "(1, 1/3, 0, 1)"], 2, "MalformedEncoding"),
        (["ext", "(1, 1/2^0, 0, 1, 3/2^0, 0, 1)", "1"], 1, "NotPermissible"),
        (["ext", "(0)"], 2, "UsageError"),
        (["ext", "(0)", "1/3"], 2, "UsageError"),
        (["ext", "(0)", "1/2^2", "(1, 1/2^0, 0, 1)", "1/2^2"], 1, "PrmsViolation"),
        (["axioms", "--instance", "nonsense"], 2, "UsageError"),
        (["axioms", "--instance", "broken"], 1, "InvariantFailure"),
    ],
)
def test_failures(capsys, argv, code, kind):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err.startswith(f"error: {kind}: ")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["diverge"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["diverge", "--upto", "-1"])
    assert info.value.code == 2


def test_ext_realizes_the_distances(capsys):
    code, out, _ = run(capsys, "ext", "(0)", "1/2^1", "(1, 1/2^0, 0, 1)", "1/2^1")
    assert code == 0
    store = Store()
    p = store.parse_encoding(out.strip())
    assert store.distance(p, store.parse_encoding("(0)")) == Dyadic(1, 1)
    assert store.distance(p, store.parse_encoding("(1, 1/2^0, 0, 1)")) == Dyadic(1, 1)
    assert run(capsys, "ext")[1] == "(1)\n"


@pytest.mark.parametrize("same", [False, True])
def test_backforth(capsys, same):
    argv = ["backforth", "--rounds", 3] + (["--same"] if same else [])
    code, out, _ = run(capsys, *argv)
    rows = table(out)
    assert code == 0
    assert rows[0] == ["round", "placed_from", "left", "right"]
    assert rows[-1] == ["invariants", "ok"]
    assert len(rows) == 2 + 6
    store = Store()
    pairs = [(store.parse_encoding(l), store.parse_encoding(r)) for _, _, l, r in rows[1:-1]]
    for a, b in pairs:
        if same:
            assert store.quot_eq(a, b)
        for c, d in pairs:
            assert store.distance(a, c) == store.distance(b, d)


def test_axioms_default_instances(capsys):
    code, out, _ = run(capsys, "axioms", "--budget", 50)
    rows = table(out)
    assert code == 0
    assert rows[0] == ["instance", "group", "axiom", "verdict", "checked", "witness"]
    assert {r[0] for r in rows[1:]} == {"dyadic", "rational", "boolean", "z2"}
    assert all(len(r) == 6 and r[3] == "pass" for r in rows[1:])


def test_axioms_broken_instance_names_a_witness(capsys):
    code, out, _ = run(capsys, "axioms", "--instance", "broken", "--budget", 50)
    failing = [r for r in table(out)[1:] if r[3] == "fail"]
    assert code == 1 and failing
    assert all(len(r) == 6 and r[5] for r in failing)


def test_diverge(capsys):
    code, out, _ = run(capsys, "diverge", "--upto", 4)
    rows = table(out)
    assert code == 0
    assert rows[1] == ["0", "(0)"]
    header = rows.index(["distance", "s_0", "s_1", "s_2", "s_3", "s_4"])
    matrix = rows[header + 1:]
    for k, row in enumerate(matrix):
        for l, cell in enumerate(row[1:]):
            assert Dyadic.parse(cell) == (Dyadic.pow2(min(k, l)) if k != l else Dyadic(0))


def enclosure(cell):
    lo, hi = cell.strip("[]").split(", ")
    return Dyadic.parse(lo), Dyadic.parse(hi)


def test_approx_diverge(capsys):
    code, out, _ = run(capsys, "approx", "--precision", 4, "diverge")
    rows = table(out)
    assert code == 0 and rows[0] == ["n", "d(divergent, (0))"]
    for n, cell in rows[1:]:
        lo, hi = enclosure(cell)
        assert lo <= 1 <= hi and hi - lo <= Dyadic.pow2(int(n))


def test_approx_homotopy_midpoint(capsys):
    code, out, _ = run(capsys, "approx", "--precision", 3, "homotopy", "1/2^1", "(0)", "(1, 2/2^0, 0, 1)")
    rows = table(out)
    assert code == 0
    for _, _, left, right in rows[1:]:
        for cell in (left, right):
            lo, hi = enclosure(cell)
            assert lo <= 1 <= hi


def test_approx_ext_against_the_divergent_point(capsys):
    code, out, _ = run(capsys, "approx", "--precision", 4, "ext", "divergent", "1", "(0)", "1")
    rows = table(out)
    assert code == 0 and len(rows) == 6
    for row in rows[1:]:
        for cell in row[2:]:
            lo, hi = enclosure(cell)
            assert lo <= 1 <= hi


def test_approx_rejects_inadmissible_real_constraints(capsys):
    code, _, err = run(capsys, "approx", "--precision", 2, "ext", "divergent", "1/2^3", "(0)", "1/2^3")
    assert code == 1 and err.startswith("error: AdmissibilityRefuted: ")


@pytest.mark.parametrize(
    "argv",
    [
        ["embed", FIXTURES / "spaces" / "six_points.metric"],
        ["backforth", "--rounds", 2],
        ["diverge", "--upto", 3],
        ["approx", "--precision", 3, "diverge"],
        ["approx", "--precision", 2, "homotopy", "1/2^2", "(0)", "(1, 2/2^0, 0, 1)"],
    ],
    ids=["embed", "backforth", "diverge", "approx-diverge", "approx-homotopy"],
)
def test_figures_are_written(capsys, tmp_path, argv):
    target = tmp_path / "nested" / "figure.png"
    code, out, _ = run(capsys, *argv, "--figure", target)
    assert code == 0 and out
    assert target.read_bytes()[:4] == PNG_MAGIC


def test_console_script_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "urysohn.cli", "dist", "(0)", "(1, 3/2^1, 0, 1)"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert done.returncode == 0 and done.stdout == "3/2^1\n"
