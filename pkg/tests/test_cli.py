"""
Tests for the command line interface and the REPL
"""

# Standard
import io
import json

# Third Party
import pytest

# Local
from hydra.cli import EXIT_EVALUATION, EXIT_OK, EXIT_PARSE, EXIT_RESOURCE, Repl, main
from hydra.expr import Session

## Helpers #####################################################################


def _run(argv, stdin_text=""):
    stdout = io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin_text), stdout=stdout)
    return code, stdout.getvalue()


@pytest.fixture
def program_file(tmp_path):
    def write(text: str, name: str = "program.hset"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


## Happy Path ##################################################################


def test_run_program(program_file):
    """run prints one line per result"""
    path = program_file("x = {x};\nx :eq μy.{y}\n:print depth=2 2\n")
    code, out = _run(["run", path])
    assert code == EXIT_OK
    assert out.splitlines() == ["true", "{{}, {...}}"]


def test_solve_program(program_file):
    """solve prints every definition's canonical form"""
    code, out = _run(["solve", program_file("x = {y};\ny = {x};\n")])
    assert code == EXIT_OK
    assert out.splitlines() == ["x = μx0.{x0}", "y = μx0.{x0}"]


def test_check_machine_readable_lines():
    """check prints AXIOM<TAB>PASS|FAIL<TAB>samples<TAB>seed"""
    code, out = _run(
        ["check", "--axiom", "pairing", "--axiom", "union", "--samples", "5", "--seed", "3"]
    )
    assert code == EXIT_OK
    assert out.splitlines() == ["pairing\tPASS\t5\t3", "union\tPASS\t5\t3"]


def test_check_in_parallel():
    """Worker threads do not change the output"""
    code, out = _run(["check", "--axiom", "afa", "--samples", "8", "--workers", "2"])
    assert code == EXIT_OK
    assert out == "afa\tPASS\t8\t0\n"


def test_bench_small_graph():
    """bench reports the size of the minimized graph"""
    code, out = _run(["bench", "--nodes", "50", "--edges", "100", "--seed", "1"])
    assert code == EXIT_OK
    assert out.startswith("nodes=50 edges=")
    assert "blocks=" in out and "seconds=" in out


def test_minimize_document(program_file):
    """minimize prints the canonical document and its encoding"""
    doc = {"node_count": 3, "point": 0, "edges": [[0, 1], [1, 2], [2, 0]]}
    code, out = _run(["minimize", program_file(json.dumps(doc), "graph.json")])
    assert code == EXIT_OK
    first, second = out.splitlines()
    assert json.loads(first) == {"node_count": 1, "point": 0, "edges": [[0, 0]]}
    assert second == "01000100"


def test_unfold_document(program_file):
    """unfold prints the truncated tree"""
    doc = {
        "signature": {"a": 1, "b": 1},
        "coalgebra": {
            "point": 0,
            "nodes": [{"symbol": "a", "children": [1]}, {"symbol": "b", "children": [0]}],
        },
    }
    code, out = _run(["unfold", program_file(json.dumps(doc), "m.json"), "--depth", "3"])
    assert code == EXIT_OK
    assert out == "a(b(a(⋯)))\n"


def test_repl_session():
    """The REPL keeps definitions until :reset and stops at :quit"""
    code, out = _run(
        ["repl"], "x = {x};\nx :eq μy.{y}\n:reset\nx\n:quit\n{}\n"
    )
    lines = out.splitlines()
    assert lines[0] == "true"
    assert lines[1] == "error: Unbound name 'x'"
    assert len(lines) == 2
    assert code == EXIT_EVALUATION


def test_repl_directly(universe):
    """Repl works on any iterable of lines"""
    out = io.StringIO()
    code = Repl(Session(universe), out).run(["{}", "", "{"])
    lines = out.getvalue().splitlines()
    assert lines[0] == "{}"
    assert lines[1].startswith("parse error: 1:2:")
    assert code == EXIT_PARSE


## Error Cases #################################################################


def test_run_parse_error(program_file):
    """Syntax errors exit with 2"""
    code, out = _run(["run", program_file("{ {}, ")])
    assert code == EXIT_PARSE
    assert out.startswith("parse error:")


def test_run_evaluation_error(program_file):
    """Unbound names exit with 1"""
    code, out = _run(["run", program_file("nope")])
    assert code == EXIT_EVALUATION
    assert "Unbound name 'nope'" in out


def test_run_resource_bound(program_file, monkeypatch):
    """Exceeded limits exit with 3"""
    monkeypatch.setenv("HYDRA_MAX_NUMERAL", "3")
    code, out = _run(["run", program_file("10")])
    assert code == EXIT_RESOURCE
    assert out.startswith("resource bound:")


def test_run_missing_file(tmp_path):
    """Unreadable files are reported, not raised"""
    code, out = _run(["run", str(tmp_path / "missing.hset")])
    assert code == EXIT_EVALUATION
    assert out.startswith("error:")


def test_check_unknown_axiom():
    """argparse rejects unknown axiom names"""
    with pytest.raises(SystemExit):
        _run(["check", "--axiom", "choice"])


def test_check_invalid_samples():
    """Invalid generation parameters exit with 1"""
    code, out = _run(["check", "--samples", "0"])
    assert code == EXIT_EVALUATION
    assert "samples" in out


def test_minimize_invalid_document(program_file):
    """Schema violations exit with 1"""
    code, _ = _run(["minimize", program_file(json.dumps({"edges": []}), "bad.json")])
    assert code == EXIT_EVALUATION
