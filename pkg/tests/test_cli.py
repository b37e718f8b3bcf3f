import io
import json

import pytest

from reliamis import apply_script, props_equal
from reliamis.cli import EXIT_ERROR, EXIT_FAIL, main
from reliamis.corpus import coupled_parallel, series, walkthrough, walkthrough_script
from reliamis.io import dump_matrix_file, dump_model_file, dump_script_file, parse_model_file, parse_script_file
from reliamis.galois import UnreachableFailureWarning, abstract_model
from reliamis.order import top
from reliamis.props import Dependency, PropertySet
from reliamis.repl import Session, run

S = walkthrough()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys, files):
    code, out, _ = run_cli(capsys, "check", files("s.json", dump_model_file(series())))
    assert code == 0 and out == "well-formed\n"
    bad = PropertySet.make(["c1", "c2"], "0.9", [Dependency.of("c1", "c2 sys")])
    code, out, _ = run_cli(capsys, "check", files("bad.json", dump_model_file(bad)))
    assert code == EXIT_FAIL and "initiality" in out


def test_normalize_and_apply(capsys, files):
    model = files("top.json", dump_model_file(top("c1")))
    script = files("walk.json", dump_script_file(walkthrough_script()))
    code, out, _ = run_cli(capsys, "apply", script, model)
    assert code == 0 and parse_model_file(out) == S[-1]
    code, again, _ = run_cli(capsys, "normalize", files("s6.json", out))
    assert code == 0 and again == out


def test_eval(capsys, files):
    model = files("s6.json", dump_model_file(S[-1]))
    code, out, _ = run_cli(capsys, "eval", model)
    assert code == 0 and out == "243/250 = 0.972000000000 (analytic)\n"
    code, out, _ = run_cli(capsys, "eval", model, "--at", "c1=0.5", "--at", "c2=0.5", "--at", "c3=0.5")
    assert out.startswith("1/2 = 0.500000000000")


def test_abstract_and_concretize(capsys, files, tmp_path):
    model = files("coupled.json", dump_model_file(coupled_parallel()))
    dot = tmp_path / "c.dot"
    code, out, _ = run_cli(capsys, "abstract", model, "--dot", str(dot))
    assert code == 0 and out == "" and dot.read_text().startswith("digraph")
    code, matrix, _ = run_cli(capsys, "abstract", model)
    assert matrix == dump_matrix_file(abstract_model(coupled_parallel()))
    code, out, _ = run_cli(capsys, "concretize", files("m.json", matrix))
    assert code == 0 and props_equal(parse_model_file(out), coupled_parallel())


def test_roundtrip(capsys, files):
    code, out, _ = run_cli(capsys, "roundtrip", files("s3.json", dump_model_file(S[2])))
    assert code == 0 and "holds" in out
    never = PropertySet.make(
        ["c1", "c2"], "0.9", [Dependency.of("c1", "c2"), Dependency.of("c2", "c1"), Dependency.of("c1 c2", "sys")]
    )
    with pytest.warns(UnreachableFailureWarning):
        code, out, _ = run_cli(capsys, "roundtrip", files("never.json", dump_model_file(never)))
    assert code == EXIT_FAIL and "FAILS" in out


def test_leq(capsys, files):
    s6, s4 = files("s6.json", dump_model_file(S[5])), files("s4.json", dump_model_file(S[3]))
    code, out, _ = run_cli(capsys, "leq", s6, s4, "--depth", "2")
    assert code == 0
    assert out.splitlines() == ["leq-witnessed (depth searched: 2)", "  add_dep c2 c1", "  add_dep c3 c1"]
    code, out, _ = run_cli(capsys, "leq", s6, s4, "--depth", "2", "--literal")
    assert code == EXIT_FAIL and out.startswith("not-leq-within-bound")


def test_simulate(capsys, files, monkeypatch):
    model = files("series.json", dump_model_file(series()))
    code, a, _ = run_cli(capsys, "simulate", model, "--trials", "2000", "--seed", "4")
    assert code == 0 and a.endswith("(2000 trials, monte-carlo)\n")
    monkeypatch.setenv("RELIAMIS_SEED", "4")
    _, b, _ = run_cli(capsys, "simulate", model, "--trials", "2000", "--workers", "2")
    assert a == b
    _, c, _ = run_cli(capsys, "simulate", model, "--trials", "100", "--at", "c1=1", "--at", "c2=1")
    assert c.startswith("1.0")


@pytest.mark.parametrize(
    "argv, category",
    [
        (["check", "/nonexistent/model.json"], "io"),
        (["eval", "BAD"], "parse-error"),
        (["eval", "RANGE"], "parse-error"),
        (["eval", "ILL"], "not-well-formed"),
        (["leq", "GOOD", "GOOD", "--depth", "0"], "depth-zero"),
        (["apply", "SCRIPT", "GOOD"], "script-error"),
        (["eval", "GOOD", "--at", "c1"], "invalid-argument"),
    ],
)
def test_errors_exit_2_with_category(capsys, files, argv, category):
    paths = {
        "BAD": files("bad.json", "{not json"),
        "RANGE": files("range.json", json.dumps({"components": [{"name": "c1", "rel": 1.5}], "deps": []})),
        "ILL": files("ill.json", dump_model_file(PropertySet.make(["c1", "c2"], "0.9", [Dependency.of("c1", "c2 sys")]))),
        "GOOD": files("good.json", dump_model_file(series())),
        "SCRIPT": files("script.json", '[{"op": "relax_rel", "c": "c1", "r": "0.95"}]'),
    }
    code, out, err = run_cli(capsys, *[paths.get(a, a) for a in argv])
    assert code == EXIT_ERROR
    assert err.startswith(f"error: {category}: ")


# -- REPL ---------------------------------------------------------------------

def session(lines, initial=None):
    out = io.StringIO()
    s = run(initial, stdin=io.StringIO("\n".join(lines) + "\n"), stdout=out)
    return s, out.getvalue()


WALK = [
    "top c1",
    "ops tighten_rel c1 0.9",
    "ops split c1 c1 c2",
    "ops remove_dep c1 c2,sys",
    "eval",
    "ops split c2 c2 c3; remove_dep c2 c1,c3,sys",
    "ops remove_dep c3 c1,c2,sys",
    "eval",
    "quit",
]


def test_scripted_walkthrough():
    s, out = session(WALK)
    assert s.current == S[-1]
    assert "R(sys) = 9/10 = 0.900000000000 (analytic)" in out
    assert out.rstrip().endswith("R(sys) = 243/250 = 0.972000000000 (analytic)")


def test_history_replays_the_session():
    s, out = session(WALK[:-1] + ["history"])
    script = out[out.index("["):]
    assert apply_script(parse_script_file(script), top("c1")) == s.current


def test_undo_restores_the_previous_state():
    before = S[0]
    s, out = session(["ops split c1 c1 c2", "undo", "undo"], initial=before)
    assert s.current == before
    assert "undid split c1 c1 c2" in out and "nothing to undo" in out


def test_bad_operator_leaves_state_alone():
    s, out = session(["ops relax_rel c1 2.0"], initial=S[0])
    assert s.current == S[0] and not s.history
    assert "error: out-of-range:" in out


def test_failed_batch_applies_nothing():
    s, out = session(["ops split c1 c1 c2; remove_dep c9 sys"], initial=S[0])
    assert s.current == S[0] and not s.history
    assert "error:" in out


def test_other_commands(tmp_path):
    q = tmp_path / "top.json"
    q.write_text(dump_model_file(top()))
    dot, saved = tmp_path / "s.dot", tmp_path / "s.json"
    s, out = session(
        ["show", "wf", "abstract", f"dot {dot}", "roundtrip", f"leq {q} 3", "leq", f"save {saved}", "eval c1=0.5", "bogus"],
        initial=S[2],
    )
    assert "well-formed" in out
    assert "states: 11 01 00" in out
    assert "holds" in out
    assert "leq-witnessed" in out
    assert "error: usage: leq" in out
    assert "R(sys) = " in out
    assert "error: unknown-command: bogus" in out
    assert dot.read_text().startswith("digraph")
    assert parse_model_file(saved.read_text()) == S[2]


def test_commands_need_a_model():
    _, out = session(["show", "eval"])
    assert out.count("error: no-model") == 2


def test_load(tmp_path):
    f = tmp_path / "series.json"
    f.write_text(dump_model_file(series()))
    s, out = session([f"load {f}", f"load {tmp_path / 'missing.json'}"])
    assert s.current == series()
    assert "error: io: " in out


def test_session_object_defaults():
    s = Session()
    assert s.current is None and s.history == []
