import io
import subprocess
import sys

import pytest

from forlog.cli import Config, build_parser, cmd_repl, cmd_run, cmd_translate, main

from conftest import GOLDEN, PROGRAMS


def prog(name):
    return str(PROGRAMS / name)


def run_cli(files, query=None, stdin="", **kw):
    out, err = io.StringIO(), io.StringIO()
    cfg = Config(files=[prog(f) for f in files], query=query, **kw)
    code = cmd_run(cfg, out, err, io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def repl(files, session, **kw):
    out, err = io.StringIO(), io.StringIO()
    code = cmd_repl(Config(files=[prog(f) for f in files], **kw), io.StringIO(session), out, err)
    return code, out.getvalue(), err.getvalue()


def test_run_write_list():
    assert run_cli(["write_list.fl"], "write_list([1,2,3])") == (0, "List: 123\nyes\n", "")


def test_run_answers_and_separators():
    code, out, _ = run_cli(["members.fl"], "colour(C)")
    assert code == 0
    assert out.count(";\n") == out.count("C = ") - 1 and out.endswith("yes\n")


def test_run_no_answer_exit_code():
    assert run_cli(["factorial.fl"], "fact(3, 7)") == (1, "no\n", "")


@pytest.mark.parametrize(
    "query,message",
    [
        ("undefined_pred", "unknown predicate undefined_pred/0"),
        ("forall X in L do write(X)", "not instantiated"),
        ("forall X in [1..N] do write(X)", "not instantiated"),
        ("X is Y + 1", "unbound variable"),
    ],
)
def test_run_errors_exit_two(query, message):
    code, out, err = run_cli(["factorial.fl"], query)
    assert code == 2 and out == ""
    assert err.startswith("error: ") and message in err


def test_partial_output_is_kept_before_error():
    code, out, err = run_cli(["factorial.fl"], "write(x) & nope")
    assert (code, out) == (2, "x\n") and "nope/0" in err


def test_embedded_queries_run_in_order():
    code, out, _ = run_cli(["matrix.fl"])
    assert code == 0 and out == (GOLDEN / "matrix.out").read_text()


def test_input_flag_scripts_read(tmp_path):
    script = tmp_path / "in.txt"
    script.write_text("5.\n")
    code, out, _ = run_cli(["factorial.fl"], "query2", input_script=str(script))
    assert code == 0 and out == (GOLDEN / "query2.out").read_text()


def test_read_falls_back_to_stdin():
    code, out, _ = run_cli(["factorial.fl"], "query2", stdin="2.\n")
    assert out == "1 factorial is: 1\n2 factorial is: 2\nyes\n"


def test_read_past_end_of_input():
    code, _, err = run_cli(["factorial.fl"], "query2")
    assert code == 2 and "input" in err


def test_max_solutions():
    code, out, _ = run_cli(["members.fl"], "colour(C)", max_solutions=1)
    assert out.count("C = ") == 1


def test_occurs_check_flag():
    assert run_cli([], "X = f(X)", occurs_check=True)[0] == 1


def test_depth_limit_flag():
    code, _, err = run_cli(["factorial.fl"], "fact(30, F)", depth_limit=5)
    assert code == 2 and "depth" in err


def test_missing_file():
    code, _, err = run_cli(["nope.fl"], "true")
    assert code == 2 and err.startswith("error: ")


def test_parse_error_names_file(tmp_path):
    bad = tmp_path / "bad.fl"
    bad.write_text("p :- .\n")
    out, err = io.StringIO(), io.StringIO()
    assert cmd_run(Config(files=[str(bad)], query="p"), out, err, io.StringIO()) == 2
    assert "bad.fl" in err.getvalue() and "1:6" in err.getvalue()


def test_trace_goes_to_stderr(capsys):
    assert main(["run", prog("factorial.fl"), "-q", "fact(1, F)", "--trace"]) == 0
    captured = capsys.readouterr()
    assert "F = 1" in captured.out
    assert captured.err.startswith("call fact(1,_G0)\n  call >(1,0)\n")


def test_translate_prints_loop_free_program():
    out, err = io.StringIO(), io.StringIO()
    assert cmd_translate(Config(files=[prog("write_list.fl")]), out, err) == 0
    assert "forall X" not in out.getvalue() and "$forall_1([X | T])" in out.getvalue()


@pytest.mark.parametrize("name,query,script", [
    ("factorial.fl", "query1", None),
    ("factorial.fl", "query2", "5.\n"),
    ("members.fl", "paint([door, wall], C)", None),
])
def test_translate_then_run_matches_direct_run(tmp_path, name, query, script):
    out = io.StringIO()
    cmd_translate(Config(files=[prog(name)]), out, io.StringIO())
    translated = tmp_path / "t.fl"
    translated.write_text(out.getvalue())
    direct, via = io.StringIO(), io.StringIO()
    codes = [
        cmd_run(Config(files=[prog(name)], query=query), direct, io.StringIO(), io.StringIO(script or "")),
        cmd_run(Config(files=[str(translated)], query=query), via, io.StringIO(), io.StringIO(script or "")),
    ]
    assert codes == [0, 0] and direct.getvalue() == via.getvalue()


def test_repl_single_solution():
    code, out, _ = repl(["factorial.fl"], "fact(0, F).\n\nhalt.\n")
    assert code == 0
    assert out == "?- F = 1 \nyes\n?- "


def test_repl_semicolon_asks_for_more():
    _, out, _ = repl([], "X = 1.\n;\nhalt.\n")
    assert out == "?- X = 1 \nno\n?- "


def test_repl_ground_goal_and_failure():
    _, out, _ = repl(["write_list.fl", "factorial.fl"], "write_list([1,2]).\nfact(1, 2).\n")
    assert out == "?- List: 12\nyes\n?- no\n?- \n"


def test_repl_reports_and_survives_errors():
    _, out, err = repl(["factorial.fl"], "p(.\nnope.\nfact(0, 1).\nhalt\n")
    assert "syntax error:" in err and "unknown predicate nope/0" in err
    assert out.count("yes\n") == 1


def test_repl_prompt_prefix_is_optional():
    _, out, _ = repl([], "?- true.\n")
    assert out.startswith("?- yes\n")


def test_parser_shares_options_across_subcommands():
    p = build_parser()
    for cmd in ("run", "repl", "translate"):
        args = p.parse_args([cmd, "a.fl", "--occurs-check", "--depth-limit", "3"])
        assert args.files == ["a.fl"] and args.occurs_check and args.depth_limit == 3


def test_console_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "forlog.cli", "run", prog("write_list.fl"), "-q", "write_list([1,2,3])"],
        capture_output=True, text=True,
    )
    assert (r.returncode, r.stdout) == (0, "List: 123\nyes\n")
