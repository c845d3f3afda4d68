from __future__ import annotations

import pytest

from oracles import GRIGORCHUK
from treegroups import zoo
from treegroups.basilica import bp_generators
from treegroups.errors import InputError, ParseError, ResourceError
from treegroups.groupfile import format_group_file, parse_group_file, parse_word
from treegroups.groups import evaluate_word
from treegroups.tree_core import GroupSpec, vertices

GRIGORCHUK_FILE = """\
# the Grigorchuk group
alphabet 2
gen a = (0 1)(e, e)
gen b = (c, a)
gen c = (d, a)
gen d = (b, e)
"""


def test_grigorchuk_file(grigorchuk):
    G = parse_group_file(GRIGORCHUK_FILE)
    assert G.names == ("a", "b", "c", "d")
    assert G.generators == grigorchuk.generators
    for name in "abcd":
        for v in vertices(2, 5):
            assert G[name].act(v) == GRIGORCHUK.act([(name, 1)], v)


def test_odometer_line(odometer2):
    G = parse_group_file("gen a = (0 1)(a, e)")
    assert G.m == 2
    assert G["a"] == odometer2["a"]


def test_alphabet_inferred_and_declared():
    G = parse_group_file("gen a = (0 1 2)(a, e, e)")
    assert G.m == 3
    assert parse_group_file("alphabet 3\ngen a = (0 1 2)(a, e, e)")["a"] == G["a"]


def test_products_powers_and_inverses(gupta_sidki):
    text = "alphabet 3\ngen a = (0 1 2)(e, e, e)\ngen b = (b, a, a^-1)\n"
    G = parse_group_file(text)
    assert G.generators == gupta_sidki.generators
    H = parse_group_file("alphabet 3\ngen a = (0 1 2)(e, e, e)\ngen b = (b, a, a^2)\n")
    assert H["b"] == G["b"]


def test_product_expression_states():
    # b * c = d in the Grigorchuk group, so x and y are the same element
    G = parse_group_file(GRIGORCHUK_FILE + "gen x = (b*c, e)\ngen y = (d, e)\n")
    assert G["x"] == G["y"]
    assert not G["x"].is_identity()


def test_growing_product_sections_hit_the_cap():
    # d = (b c c, e) feeds its own product back into longer and longer words
    with pytest.raises(ResourceError):
        parse_group_file(GRIGORCHUK_FILE.replace("gen d = (b, e)", "gen d = (b*c*c, e)"))


def test_state_keyword(grigorchuk):
    text = "gen a = (0 1)(e, e)\ngen b = (c, a)\nstate c = (d, a)\nstate d = (b, e)\n"
    G = parse_group_file(text)
    assert G.names == ("a", "b")
    assert G["b"] == grigorchuk["b"]


def test_semicolons_and_comments(odometer2):
    G = parse_group_file("alphabet 2 ; gen a = (0 1)(a, e)  # odometer")
    assert G["a"] == odometer2["a"]


@pytest.mark.parametrize(
    "text,line",
    [
        ("", None),
        ("# only a comment\n", None),
        ("alphabet 2\ngen a = (0 1)(a, e, e)\n", 2),
        ("alphabet 2\ngen a = (0 1)(a, e)\ngen b = (x, e)\n", 3),
        ("alphabet 2\ngen a = (0 5)(a, e)\n", 2),
        ("alphabet 2\n\ngen a = (0 1)(a, e)\ngen a = (a, e)\n", 4),
        ("alphabet 2\ngen a = (0 1)(a^0, e)\n", 2),
        ("alphabet 2\ngen e = (e, e)\n", 2),
        ("gen a = (0 1)(a, e)\nalphabet 2\n", 2),
        ("alphabet 2\nfoo bar\n", 2),
        ("alphabet x\n", 1),
        ("alphabet 2\ngen a = (0 1(a, e)\n", 2),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_group_file(text)
    assert info.value.line == line


def test_state_cap():
    with pytest.raises(ResourceError):
        parse_group_file(GRIGORCHUK_FILE, state_cap=3)


@pytest.mark.parametrize(
    "G",
    [
        zoo.odometer(2),
        zoo.odometer(3, carry=2),
        zoo.odometer_product(2, 2),
        zoo.generalised_basilica(2, 3, 2),
        zoo.grigorchuk(),
        zoo.gupta_sidki(3),
        zoo.gupta_sidki(5),
        zoo.ggs((3, (1, 0))),
        zoo.fabrykowski_gupta(),
        zoo.infinite_dihedral(),
        bp_generators(zoo.grigorchuk(), 2),
    ],
)
def test_zoo_round_trip(G):
    text = format_group_file(G, comment="round trip\nsecond line")
    assert text.startswith("# round trip\n# second line\n")
    H = parse_group_file(text)
    assert H.names == G.names
    assert [h.key() for h in H.generators] == [g.canonical().key() for g in G.generators]


def test_format_refuses_bad_names():
    G = bp_generators(zoo.odometer(2), 2)
    with pytest.raises(InputError):
        format_group_file(GroupSpec(2, ("a|0",), (G.generators[0],)))


def test_parse_word(grigorchuk):
    assert parse_word("a*b^-1*c^2", grigorchuk) == [("a", 1), ("b", -1), ("c", 1), ("c", 1)]
    assert parse_word("e", grigorchuk) == []
    assert evaluate_word(grigorchuk, parse_word("b*c", grigorchuk)) == grigorchuk["d"]
    with pytest.raises(InputError):
        parse_word("z", grigorchuk)
