import pytest
from click.testing import CliRunner

from domlogic.cli import cli

LTS = """\
acts a b1 b2
trans p a p1
div p
trans q2 a r1
trans q2 a r2
trans r1 b1 z1
trans r2 b2 z2
div q2
"""
BB = "(+ (lift 1) (lift 1))"


def run(*args):
    res = CliRunner().invoke(cli, list(args))
    lines = res.output.splitlines()
    assert lines and lines[-1].startswith("RESULT: "), res.output
    return res.exit_code, res.output


@pytest.fixture
def lts_file(tmp_path):
    p = tmp_path / "lts.txt"
    p.write_text(LTS)
    return str(p)


def test_entail_exit_codes():
    assert run("entail", "--type", f"(-> {BB} {BB})", "tt", "tt")[0] == 0
    code, out = run("entail", "--type", BB, "tt", "(inl (lift tt))")
    assert code == 1 and "witness: element sbot" in out


def test_entail_batch_file(tmp_path):
    f = tmp_path / "q.txt"
    f.write_text("(inl (lift tt)) tt\ntt (inl (lift tt))\n")
    code, out = run("entail", "--type", BB, "--file", str(f))
    assert code == 1
    assert "yes (inl (lift tt)) <= tt" in out and "1 of 2 fail" in out


def test_cdnf_and_check():
    phi = "(arrow (or (inl (lift tt)) (inr (lift tt))) (inl (lift tt)))"
    code, out = run("cdnf", "--type", f"(-> {BB} {BB})", phi)
    split = "(and (arrow (inl (lift tt)) (inl (lift tt))) (arrow (inr (lift tt)) (inl (lift tt))))"
    assert code == 0 and out.splitlines()[-1] == f"RESULT: cdnf (or {split})"
    code, _ = run("check", "--var", "x", "(lift 1)", "(lift tt)", "(liftlet x y (up star))", "(lift tt)")
    assert code == 0
    code, out = run("check", "--var", "x", "(lift 1)", "tt", "(liftlet x y (up star))", "(lift tt)")
    assert code == 1 and "witness" in out


def test_process_commands(lts_file):
    assert run("proc-sat", lts_file, "p", "(dia (act a (box ff)))")[0] == 0
    assert run("proc-sat", lts_file, "q2", "(dia (act a (box ff)))")[0] == 1
    code, out = run("proc-bisim", lts_file, "p", "q2")
    assert code == 1 and "(dia (act a (box ff)))" in out
    code, out = run("proc-sdnf", "(box (act a tt))")
    assert code == 0 and "(or (and (box (act a tt)) (dia (act a tt))) (box ff))" in out
    assert "(init)" in run("proc-translate", "--acts", "a b", "(box ff)")[1]


def test_sccs_commands(tmp_path):
    t1, t2 = tmp_path / "t1.sccs", tmp_path / "t2.sccs"
    t1.write_text("Omega\n")
    t2.write_text("O\n")
    code, out = run("sccs-fa", str(t1), str(t2))
    assert code == 0 and "below only left-to-right" in out
    code, out = run("sccs-step", "(times (pre a O) (pre b O))")
    assert code == 0 and "a.b -> (times O O)" in out


def test_lazy_commands():
    assert run("lazy-eval", "(lam x Omega)")[0] == 0
    assert run("lazy-eval", "--fuel", "50", "Omega")[0] in (1, 2)
    assert run("lazy-entail", "lam", "t")[0] == 0
    assert run("lazy-entail", "t", "lam")[0] == 1
    assert run("lazy-check", "(K Omega)", "lam")[0] == 0
    code, out = run("lazy-classify", "(x Omega)")
    assert code == 0 and "head form x with 1 argument" in out


@pytest.mark.parametrize("args", [
    ("entail", "--type", BB, "(pair tt)", "tt"),
    ("entail", "--type", "(lift 1)", "(inl tt)", "tt"),
    ("lazy-eval", "(C x)"),
    ("sccs-step", "(pre c O)"),
    ("proc-sat", "/nonexistent/dir/lts.txt", "p", "tt"),
])
def test_bad_input_exits_2(args):
    code, out = run(*args)
    assert code == 2 and "RESULT: error" in out


def test_oracle_suite_is_deterministic():
    args = ("oracle-suite", "--module", "logic-core", "--cases", "5", "--seed", "3")
    first, second = run(*args), run(*args)
    assert first == second and first[0] == 0
