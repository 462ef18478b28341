import pytest

from pastlogic.dsl import DSLError, Kw, Sym, check_file, loads, parse, render

TINY = """
(universe (addresses a) (values 0..1) (heap-shape full) (denominator 1))
(outline bump
  (pre true)
  (step (write a 1 :label w) (pts a 1)))
(certify :depth 3)
"""


def test_parse_atoms_and_comments():
    forms = parse('(step (read l x :label r) "s") ; trailing comment\n(a -3)')
    assert forms[0][0] == Sym("step") and isinstance(forms[0][1][3], Kw)
    assert forms[0][2] == "s" and forms[1][1] == -3


def test_render_round_trip():
    text = "(and (= x nl) (past (pts l nl)))"
    assert render(parse(text)[0]) == text
    assert render(parse("(= x n)")[0], {Sym("n"): 2}) == "(= x 2)"


@pytest.mark.parametrize("bad", ["(a (b)", "a)", "(x :kw)"])
def test_syntax_errors(bad):
    with pytest.raises(DSLError):
        loads(bad)


def test_tiny_file_accepted():
    rep = check_file(loads(TINY, "tiny"))
    assert rep.ok and [j.name for j in rep.judgments] == ["bump"]


def test_unstable_assertion_reported():
    # another thread running the same outline may write a concurrently
    rep = check_file(loads(TINY.replace("(pre true)", "(pre (pts a 0))"), "tiny"))
    assert rep.accepted and rep.ifree_failures and not rep.ok


def test_wrong_post_rejected():
    rep = check_file(loads(TINY.replace("(pts a 1)))", "(pts a 0)))"), "tiny"))
    assert not rep.accepted and "w" in rep.error


def test_unknown_form_is_an_error():
    with pytest.raises(DSLError):
        check_file(loads(TINY + "(outline x (pre true) (frobnicate))", "tiny"))


def test_universe_override(tmp_path):
    ini = tmp_path / "u.ini"
    ini.write_text("[universe]\naddresses = a\nvalues = 0..2\nheap_shape = full\n"
                   "denominator = 1\n")
    pf = loads(TINY, "tiny", str(ini))
    assert pf.universe.values == (0, 1, 2)
