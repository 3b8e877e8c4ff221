import json

import pytest

from dermod.cli import main
from dermod.moduli import format_connection, random_flat_connection
from dermod.scomplex import format_space, standard_simplex, torus


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spaces(capsys):
    code, out, _ = run(capsys, "spaces")
    assert code == 0 and "torus" in out and "circle:K" in out


def test_tangent_on_the_torus(capsys):
    code, out, _ = run(capsys, "tangent", "--space", "torus", "--connection", "trivial", "--r", "2",
                       "--basepoint", "v")
    assert code == 0
    assert "H^0 = 8" in out and "H^1 = 4" in out


def test_human_and_json_agree(capsys):
    args = ["tangent", "--space", "sphere", "--r", "2", "--pre-quotient"]
    _, human, _ = run(capsys, *args)
    code, out, _ = run(capsys, *args, "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["dims"] == [0, 4] and report["pre_quotient_dims"] == [12, 4]
    for k, d in enumerate(report["dims"]):
        assert f"H^{k} = {d}" in human


@pytest.mark.parametrize("argv", [
    ["tangent", "--space", "torus", "--connection", "random", "--r", "2", "--seed", "3", "--bases"],
    ["bracket", "--space", "torus", "--r", "2"],
    ["resolution-check", "--n", "2", "--r", "2", "--seed", "5"],
    ["suite", "--only", "4", "5"],
])
def test_json_output_is_byte_stable(capsys, argv):
    first = run(capsys, *argv, "--format", "json")
    second = run(capsys, *argv, "--format", "json")
    assert first == second and first[0] == 0
    json.loads(first[1])


def test_resolution_check(capsys):
    code, out, _ = run(capsys, "resolution-check", "--n", "3", "--r", "1")
    assert code == 0 and "all checks pass" in out


def test_bracket(capsys):
    code, out, _ = run(capsys, "bracket", "--space", "torus", "--r", "1")
    assert code == 0 and "all brackets vanish" in out
    code, out, _ = run(capsys, "bracket", "--space", "torus", "--r", "2", "--format", "json")
    report = json.loads(out)
    assert report["antisymmetric"] and report["jacobi"] and report["constants"]


def test_invariance(capsys):
    code, out, _ = run(capsys, "invariance", "--space", "circle:1", "--other-space", "circle:3", "--r", "2",
                       "--format", "json")
    assert code == 0 and json.loads(out)["equal"]
    code, out, _ = run(capsys, "invariance", "--space", "torus", "--other-space", "sphere", "--r", "2")
    assert code == 2 and "DIFFERENT" in out


def test_files(capsys, tmp_path):
    space = tmp_path / "t.space"
    space.write_text(format_space(torus()))
    conn = random_flat_connection(torus(), 2, __import__("random").Random(1))
    path = tmp_path / "t.conn"
    path.write_text(format_connection(conn))
    code, out, _ = run(capsys, "tangent", "--space", str(space), "--connection", str(path), "--format", "json")
    assert code == 0 and json.loads(out)["connection"] == conn.digest()
    code, _, err = run(capsys, "tangent", "--space", str(space), "--connection", str(path), "--r", "1")
    assert code == 1 and "r = 2" in err


def test_broken_face_table(capsys, tmp_path):
    text = format_space(standard_simplex(2)).replace("simplex 012 2 12 02 01", "simplex 012 2 02 12 01")
    path = tmp_path / "bad.space"
    path.write_text(text)
    code, out, _ = run(capsys, "validate", "--space", str(path))
    assert code == 2 and "012" in out
    code, _, err = run(capsys, "tangent", "--space", str(path))
    assert code == 2 and "invariant violation" in err


def test_non_flat_input(capsys, tmp_path):
    path = tmp_path / "nf.conn"
    path.write_text("r 2\nedge a 1 1 0 1\nedge b 1 0 1 1\nedge c 2 1 1 1\n")
    code, _, err = run(capsys, "tangent", "--space", "torus", "--connection", str(path))
    assert code == 3 and "2-simplex L" in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["tangent"],
    ["tangent", "--space", "klein"],
    ["tangent", "--space", "torus", "--r", "0"],
    ["tangent", "--space", "torus", "--connection", "/nonexistent/file"],
    ["resolution-check", "--n", "-1", "--r", "1"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 1


def test_missing_edge_is_an_invariant_violation(capsys, tmp_path):
    path = tmp_path / "short.conn"
    path.write_text("r 1\nedge a 1\n")
    code, _, err = run(capsys, "tangent", "--space", "torus", "--connection", str(path))
    assert code == 2 and "edge b" in err
