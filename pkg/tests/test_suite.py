import pytest

from dermod.exactlin import Matrix
from dermod.moduli import Connection
from dermod.scomplex import torus
from dermod.suite import CriterionResult, diagonal_torus_connection, run_criterion, weight_block_oracle
from oracles import twisted_dims


@pytest.mark.parametrize("a,b", [((1, 2), (3, 1)), ((1, 1), (1, 1)), ((2, 2), (1, 3)), ((1, -1), (-1, 1))])
def test_weight_block_oracle_matches_sympy(a, b):
    diag = {"a": list(a), "b": list(b), "c": [x * y for x, y in zip(a, b)]}
    edges = {e: Matrix.diagonal(v).to_rows() for e, v in diag.items()}
    assert weight_block_oracle(torus(), diag) == twisted_dims(torus(), edges, 2)


def test_diagonal_fixture():
    conn = diagonal_torus_connection()
    assert conn["c"] == Matrix.diagonal([3, 2])
    assert isinstance(conn, Connection)


def test_result_lines():
    ok = CriterionResult(3, "x", True, "fine", 1.5)
    assert ok.line() == "[PASS]  3. x: fine (1.50s)"
    assert CriterionResult(10, "y", False, "bad").line(timing=False) == "[FAIL] 10. y: bad"
    assert ok.to_dict() == {"number": 3, "name": "x", "passed": True, "detail": "fine"}


def test_unknown_criterion():
    with pytest.raises(KeyError):
        run_criterion(11)
