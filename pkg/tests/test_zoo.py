from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import GUPTA_SIDKI_3, Recursion, basilica_recursion
from treegroups import zoo
from treegroups.basilica import beta, label_vertex
from treegroups.errors import InputError
from treegroups.tree_core import (
    commutator,
    compose,
    decompose,
    identity,
    inverse,
    power,
    rooted,
    vertices,
)


def test_sigma():
    assert zoo.sigma(3) == (1, 2, 0)
    assert zoo.sigma(3, -1) == (2, 0, 1)
    assert zoo.sigma_power(4, 2) == (2, 3, 0, 1)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_odometer_recursion(m):
    a = zoo.odometer(m)["a"]
    p, secs = decompose(a)
    assert p == zoo.sigma(m)
    assert secs == (a,) + (identity(m),) * (m - 1)
    assert a.num_states == 2


def test_odometer_carry_variant():
    a = zoo.odometer(3, carry=2)["a"]
    assert a.act("22") == (0, 0)
    assert a.act("12") == (2, 2)
    with pytest.raises(InputError):
        zoo.odometer(3, carry=3)
    with pytest.raises(InputError):
        zoo.odometer(1)


def test_odometer_is_add_one():
    # with the carry at m - 1, a adds one to little-endian m-adic integers
    m, n = 3, 4
    a = zoo.odometer(m, carry=m - 1)["a"]
    for v in vertices(m, n):
        value = sum(x * m**k for k, x in enumerate(v))
        image = sum(x * m**k for k, x in enumerate(a.act(v)))
        assert image == (value + 1) % m**n


def test_odometer_product_trivial_case():
    assert zoo.odometer_product(2, 1).generators == zoo.odometer(2).generators


def test_odometer_product_embedding():
    G = zoo.odometer_product(2, 2)
    a0, a1 = G.generators
    p, secs = decompose(a1)
    assert p == (0, 1)
    assert secs == (a0, a0)
    p, secs = decompose(a0)
    assert p == (1, 0)
    assert secs == (a1, identity(2))
    assert commutator(a0, a1).is_identity()


@pytest.mark.parametrize("m,d", [(2, 3), (3, 2)])
def test_odometer_product_generators_commute(m, d):
    gens = zoo.odometer_product(m, d).generators
    for g in gens:
        for h in gens:
            assert commutator(g, h).is_identity()


def test_generalised_basilica_recursion():
    G = zoo.generalised_basilica(2, 3, 2)
    assert G.names == ("a_0_0", "a_0_1", "a_1_0", "a_1_1")
    s3 = zoo.sigma(3)
    ident = identity(3)
    # a_{0,0} = sigma (a_{d-1,s-1}, id, id) and a_{i,0} = (a_{i-1,s-1}, ..., a_{i-1,s-1})
    assert decompose(G["a_0_0"]) == (s3, (G["a_1_1"], ident, ident))
    assert decompose(G["a_1_0"]) == ((0, 1, 2), (G["a_0_1"],) * 3)
    assert decompose(G["a_1_1"]) == ((0, 1, 2), (G["a_1_0"], ident, ident))
    assert decompose(G["a_0_1"]) == ((0, 1, 2), (G["a_0_0"], ident, ident))


@pytest.mark.parametrize("m,s", [(2, 2), (2, 3), (3, 2)])
def test_generalised_basilica_against_hand_recursion(m, s):
    G = zoo.generalised_basilica(1, m, s)
    oracle = basilica_recursion(m, s)
    for name, g in G.items():
        for v in vertices(m, 4):
            assert g.act(v) == oracle.act([(name, 1)], v)


def test_generalised_basilica_is_bp_of_product():
    a = zoo.odometer(2)["a"]
    G = zoo.generalised_basilica(1, 2, 3)
    assert G.generators == tuple(beta(a, 3, j) for j in range(3))


def test_finitary():
    assert zoo.finitary((0, 1), "01").is_identity()
    assert zoo.finitary((1, 0), "") == rooted((1, 0))
    g = zoo.finitary((1, 2, 0), "2")
    assert g.label("2") == (1, 2, 0)
    assert g.act("21") == (2, 2)
    assert g.act("12") == (1, 2)


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.data())
def test_finitary_transport(m, s, data):
    i = data.draw(st.integers(0, s - 1))
    u = tuple(data.draw(st.lists(st.integers(0, m - 1), max_size=3)))
    tau = zoo.sigma(m)
    assert beta(zoo.finitary(tau, u, m), s, i) == zoo.finitary(tau, label_vertex(i, s, u), m)


def test_ggs_flags():
    gs = zoo.GGSSpec(3, (1, 2))
    assert gs.sum_condition and gs.non_symmetric
    fg = zoo.GGSSpec(3, (1, 0))
    assert not fg.sum_condition and fg.non_symmetric
    sym = zoo.GGSSpec(3, (1, 1))
    assert not sym.sum_condition and not sym.non_symmetric
    assert zoo.GGSSpec(5, (1, 4, 0, 0)).sum_condition
    assert zoo.GGSSpec(3, (4, -1)).e == (1, 2)
    with pytest.raises(InputError):
        zoo.GGSSpec(3, (1,))


def test_gupta_sidki_matches_ggs_and_oracle(gupta_sidki):
    G = zoo.ggs((3, (1, 2)))
    assert G.generators == gupta_sidki.generators
    a, b = gupta_sidki["a"], gupta_sidki["b"]
    assert decompose(b) == ((0, 1, 2), (b, a, inverse(a)))
    for v in vertices(3, 4):
        assert b.act(v) == GUPTA_SIDKI_3.act([("b", 1)], v)
        assert compose(a, b).act(v) == GUPTA_SIDKI_3.act([("a", 1), ("b", 1)], v)
    assert power(b, 3).is_identity()


def test_gupta_sidki_p5():
    G = zoo.gupta_sidki(5)
    a, b = G["a"], G["b"]
    ident = identity(5)
    assert decompose(b)[1] == (b, a, inverse(a), ident, ident)
    with pytest.raises(InputError):
        zoo.gupta_sidki(2)


def test_grigorchuk_relations(grigorchuk):
    a, b, c, d = (grigorchuk[x] for x in "abcd")
    ident = identity(2)
    assert decompose(b) == ((0, 1), (c, a))
    assert decompose(c) == ((0, 1), (d, a))
    assert decompose(d) == ((0, 1), (b, ident))
    assert compose(b, c) == d
    for x in (a, b, c, d):
        assert power(x, 2).is_identity()


def test_fabrykowski_gupta():
    G = zoo.fabrykowski_gupta()
    a, b = G["a"], G["b"]
    oracle = Recursion(3, {"a": ((1, 2, 0), [None] * 3), "b": ((0, 1, 2), ["a", None, "b"])})
    for v in vertices(3, 4):
        assert b.act(v) == oracle.act([("b", 1)], v)
    assert decompose(b)[1] == (a, identity(3), b)
    assert power(b, 3).is_identity()
    assert not power(compose(a, b), 27).is_identity()


def test_infinite_dihedral():
    G = zoo.infinite_dihedral()
    x, b = G["sigma"], G["b"]
    assert power(x, 2).is_identity() and power(b, 2).is_identity()
    assert not power(compose(x, b), 8).is_identity()


def test_gamma_generators():
    G = zoo.gamma_generators(2, 2)
    assert G.names == ("g", "g_0", "g_1")
    assert G["g_1"] == zoo.finitary((1, 0), "1")
