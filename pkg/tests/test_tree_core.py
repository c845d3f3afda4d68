from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import GRIGORCHUK, Recursion
from treegroups import zoo
from treegroups.basilica import beta
from treegroups.errors import InputError
from treegroups.groups import evaluate_word
from treegroups.tree_core import (
    Automorphism,
    Machine,
    act,
    canonicalize,
    commutator,
    compose,
    decompose,
    format_cycles,
    format_portrait,
    from_recursion,
    from_wreath,
    identity,
    inverse,
    is_identity,
    label,
    parse_cycles,
    portrait,
    power,
    rooted,
    section,
    to_dot,
    vertex,
    vertices,
)

SWAP = (1, 0)
ID2 = (0, 1)


@pytest.fixture(scope="module")
def carry_odometer():
    """a = (0 1)(id, a): the add-one map on little-endian binary integers."""
    return zoo.odometer(2, carry=1)["a"]


# --- permutations and vertices -------------------------------------------------


def test_parse_and_format_cycles_round_trip():
    p = parse_cycles("(0 1 2)(3 4)", 5)
    assert p == (1, 2, 0, 4, 3)
    assert format_cycles(p) == "(0 1 2)(3 4)"
    assert format_cycles((0, 1, 2)) == "()"
    assert parse_cycles("()", 3) == (0, 1, 2)


def test_cycles_compose_right_to_left():
    # (0 1)(1 2): 1 -> 2 -> 2, 2 -> 1 -> 0, 0 -> 0 -> 1
    assert parse_cycles("(0 1)(1 2)", 3) == (1, 2, 0)


@pytest.mark.parametrize("bad", ["(0 3)", "(0 0)", "0 1", "(0 x)", ""])
def test_malformed_cycles_rejected(bad):
    with pytest.raises(InputError):
        parse_cycles(bad, 3)


def test_vertex_normalisation():
    assert vertex("0110") == (0, 1, 1, 0)
    assert vertex("") == ()
    with pytest.raises(InputError):
        vertex("02", 2)


# --- act / section / label -------------------------------------------------------


def test_identity_acts_trivially():
    assert act(identity(2), "0110") == (0, 1, 1, 0)
    assert section(identity(2), "0101").is_identity()
    assert label(identity(3), "21") == (0, 1, 2)


def test_odometer_action(carry_odometer):
    a = carry_odometer
    assert act(a, "1") == (0,)
    assert act(a, "11") == (0, 0)
    assert act(a, "011") == (1, 1, 1)


def test_odometer_sections(carry_odometer):
    a = carry_odometer
    assert section(a, "1") == a
    assert section(a, "0").is_identity()
    assert label(a, "") == SWAP


def test_act_rejects_bad_letters(carry_odometer):
    with pytest.raises(InputError):
        act(carry_odometer, "012")


def test_basilica_section(basilica):
    b = basilica["a_0_0"]
    assert section(b, "0") == basilica["a_0_1"]
    assert section(b, "1").is_identity()


def test_label_of_delayed_odometer():
    c = zoo.odometer(2)["a"]
    g = beta(c, 8, 3)
    assert label(g, "000") == SWAP
    for u in vertices(2, 4):
        if u != (0, 0, 0):
            assert label(g, u) == ID2
    # the next non-trivial label sits eight layers further down
    assert label(g, (0,) * 11) == SWAP


# --- arithmetic ------------------------------------------------------------------------


def test_compose_inverse_is_identity(carry_odometer):
    a = carry_odometer
    assert compose(a, inverse(a)).is_identity()
    assert inverse(identity(2)).is_identity()
    assert act(inverse(a), "0") == (1,)


def test_odometer_square():
    a = zoo.odometer(2)["a"]
    p, secs = decompose(compose(a, a))
    assert p == ID2
    assert secs == (a, a)


def test_basilica_generators_do_not_commute(odometer2):
    a = odometer2["a"]
    b0, b1 = beta(a, 2, 0), beta(a, 2, 1)
    assert compose(b0, b1) != compose(b1, b0)
    assert not is_identity(commutator(b0, b1))


def test_action_convention_right_factor_first(grigorchuk):
    a, b = grigorchuk["a"], grigorchuk["b"]
    ab = compose(a, b)
    for v in vertices(2, 4):
        assert ab.act(v) == a.act(b.act(v))
        assert ab.act(v) == GRIGORCHUK.act([("a", 1), ("b", 1)], v)


def test_power_matches_repeated_compose(gupta_sidki):
    b = gupta_sidki["b"]
    assert power(b, 3).is_identity()
    assert power(b, -2) == b
    assert power(b, 0).is_identity()


def test_alphabet_mismatch():
    with pytest.raises(InputError):
        compose(identity(2), identity(3))


# --- canonical forms ----------------------------------------------------------------


def test_redundant_identity_collapses():
    mach = Machine(2, (ID2, ID2, ID2), ((1, 2), (2, 1), (0, 0)))
    g = Automorphism(mach, 0)
    c = canonicalize(g)
    assert c.machine.size == 1
    assert c.is_identity()


def test_canonical_odometer_has_two_states(carry_odometer):
    assert carry_odometer.num_states == 2
    assert canonicalize(compose(carry_odometer, inverse(carry_odometer))).num_states == 1


def test_basilica_commutator_is_not_identity(basilica):
    a, b = basilica["a_0_1"], basilica["a_0_0"]
    w = evaluate_word(basilica, [("a_0_1", 1), ("a_0_0", 1), ("a_0_1", -1), ("a_0_0", -1)])
    assert not w.is_identity()
    assert w == compose(compose(a, b), compose(inverse(a), inverse(b)))
    assert any(label(w, u) != ID2 for n in range(4) for u in vertices(2, n))


def test_machine_validation():
    with pytest.raises(InputError):
        Machine(2, (ID2,), ((0, 3),))
    with pytest.raises(InputError):
        Machine(2, (SWAP,), ((0, 0),), identity_state=0)
    with pytest.raises(InputError):
        Machine(1, ((0,),), ((0,),))


# --- wreath recursion --------------------------------------------------------------


def test_from_wreath_builds_odometer():
    a = zoo.odometer(2)["a"]
    assert from_wreath(SWAP, (a, identity(2))) == a
    assert from_wreath(ID2, (identity(2), identity(2))).is_identity()


def test_decompose_from_wreath_round_trip(grigorchuk):
    secs = (grigorchuk["b"], grigorchuk["a"])
    g = from_wreath(SWAP, secs)
    assert decompose(g) == (SWAP, secs)


def test_from_recursion_grigorchuk_relations():
    sol = from_recursion(2, {
        "a": (SWAP, [None, None]),
        "b": (ID2, ["c", "a"]),
        "c": (ID2, ["d", "a"]),
        "d": (ID2, ["b", None]),
    })
    assert compose(sol["b"], sol["c"]) == sol["d"]
    assert power(sol["a"], 2).is_identity()
    with pytest.raises(InputError):
        from_recursion(2, {"x": (SWAP, ["y", None])})


def test_rooted():
    g = rooted((1, 2, 0))
    assert g.act("21") == (0, 1)
    assert g.num_states == 2


# --- portraits and DOT ---------------------------------------------------------------


def test_portraits(carry_odometer, odometer2):
    assert all(p == ID2 for p in portrait(identity(2), 3).labels.values())
    assert portrait(carry_odometer, 2).labels == {(): SWAP, (0,): ID2, (1,): SWAP}
    b1 = beta(odometer2["a"], 2, 1)
    assert portrait(b1, 2).labels == {(): ID2, (0,): SWAP, (1,): ID2}
    text = format_portrait(portrait(carry_odometer, 3), skip_identity=True)
    assert text.splitlines() == ["ε: (0 1)", "1: (0 1)", "11: (0 1)"]


def test_dot_output(odometer2):
    dot = to_dot(odometer2["a"], "a")
    assert dot.startswith("digraph a {")
    assert '[label="0:1"]' in dot
    assert dot.rstrip().endswith("}")


# --- properties ------------------------------------------------------------------------


@st.composite
def machines(draw):
    m = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(1, 4))
    perms = tuple(tuple(draw(st.permutations(range(m)))) for _ in range(n))
    nexts = tuple(tuple(draw(st.integers(0, n - 1)) for _ in range(m)) for _ in range(n))
    return Automorphism(Machine(m, perms, nexts), draw(st.integers(0, n - 1)))


@st.composite
def machine_pairs(draw):
    g = draw(machines())
    while True:
        h = draw(machines())
        if h.m == g.m:
            return g, h


def words_of(m, depth):
    return st.lists(st.integers(0, m - 1), max_size=depth).map(tuple)


@given(machine_pairs(), st.data())
def test_section_of_product(pair, data):
    g, h = pair
    u = data.draw(words_of(g.m, 6))
    gh = compose(g, h)
    assert gh.section(u) == compose(g.section(h.act(u)), h.section(u))
    assert gh.label(u) == tuple(g.label(h.act(u))[x] for x in h.label(u))


@given(machines(), st.data())
def test_section_of_section(g, data):
    u = data.draw(words_of(g.m, 3))
    v = data.draw(words_of(g.m, 3))
    assert g.section(u + v) == g.section(u).section(v)


@given(machines())
def test_canonicalize_idempotent_and_faithful(g):
    c = canonicalize(g)
    assert canonicalize(c).machine == c.machine
    for n in range(5):
        for v in vertices(g.m, n):
            assert c.act(v) == g.act(v)


def _rec(g: Automorphism) -> Recursion:
    mach = g.machine
    table = {}
    for q in range(mach.size):
        table[str(q)] = (mach.perms[q], [str(t) for t in mach.nexts[q]])
    return Recursion(g.m, table)


@given(machines())
def test_action_matches_recursion_oracle(g):
    oracle = _rec(g)
    for v in vertices(g.m, 4):
        assert g.act(v) == oracle.act([(str(g.initial), 1)], v)
        assert inverse(g).act(v) == oracle.act([(str(g.initial), -1)], v)


GROUPS = [zoo.grigorchuk(), zoo.gupta_sidki(3), zoo.generalised_basilica(1, 2, 2),
          zoo.generalised_basilica(2, 3, 2), zoo.fabrykowski_gupta()]


@st.composite
def zoo_words(draw, max_len=8):
    G = draw(st.sampled_from(GROUPS))
    word = draw(st.lists(st.tuples(st.sampled_from(G.names), st.sampled_from([1, -1])),
                         max_size=max_len))
    return G, word


@given(zoo_words())
def test_word_times_inverse_is_identity(gw):
    G, word = gw
    g = evaluate_word(G, word)
    assert compose(g, inverse(g)).is_identity()
    assert compose(inverse(g), g).is_identity()
