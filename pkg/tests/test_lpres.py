from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    heis_normal_form,
    heis_word,
    invariants_from_diagonal,
    random_heisenberg_images,
    smith_diagonal,
)
from treegroups import zoo
from treegroups.errors import Inconclusive, InputError, ParseError
from treegroups.lpres import (
    Class2Element,
    FreeWord,
    IntLattice,
    LPresentation,
    abelian_invariants,
    abelianization_check,
    alpha,
    alpha_carry,
    apply_phi,
    apply_theta,
    class2_quotient,
    collect,
    comm,
    failing_relators,
    format_relators,
    pair_index,
    parse_relators,
    phi_stabilization,
    relators,
    relator_comm_vectors,
    relators_by_depth,
    stabilization_depth,
    verify_relators,
)

g = FreeWord.gen


def free_words(d: int, s: int, max_len: int = 10):
    letter = st.tuples(st.integers(0, d - 1), st.integers(0, s - 1), st.sampled_from([1, -1]))
    return st.lists(letter, max_size=max_len).map(lambda xs: FreeWord(tuple(xs)))


# --- free words ------------------------------------------------------------------------


def test_free_word_reduction():
    w = g(0, 1) * g(0, 1, -1) * g(1, 0)
    assert w == g(1, 0)
    assert (g(0, 0) ** 3).letters == ((0, 0, 1),) * 3
    assert g(0, 0) ** -2 == g(0, 0, -2)
    assert (w * w.inverse()).letters == ()


def test_comm_and_conj_conventions():
    x, y = g(0, 0), g(0, 1)
    assert comm(x, y) == x.inverse() * y.inverse() * x * y
    assert x.conj(y) == y.inverse() * x * y
    assert comm(x, x).letters == ()


def test_exponent_sums():
    w = g(1, 2) * g(0, 1, 3) * g(1, 2, -1)
    assert w.exponent_sums(2, 3) == [0, 3, 0, 0, 0, 0]


# --- alpha, Phi, Theta -------------------------------------------------------------------


def test_alpha_examples():
    assert alpha((0,), 0, 2).letters == ()
    assert alpha((1, 0), 1, 2) == g(0, 0, 3)
    assert alpha((-1, 2), 1, 3) == g(0, 0, -2) * g(1, 0, 2)
    with pytest.raises(InputError):
        alpha((0,), 2, 2)


@given(st.integers(2, 4), st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.data())
def test_alpha_carry(m, v, data):
    k = data.draw(st.integers(0, m - 1))
    v2, k2 = alpha_carry(v, k, m)
    lhs = (alpha(v, k, m) * g(0, 0)).exponent_sums(len(v), 1)
    assert lhs == alpha(v2, k2, m).exponent_sums(len(v), 1)
    assert 0 <= k2 < m


def test_phi_examples():
    d, m, s = 2, 3, 3
    assert apply_phi(g(0, 0), d, m, s) == g(0, 1)
    assert apply_phi(g(0, 2), d, m, s) == g(1, 0)
    assert apply_phi(g(1, 2), d, m, s) == g(0, 0, m)
    assert apply_phi(g(1, 2, -1), d, m, s) == g(0, 0, -m)


def test_phi_walks_the_generator_order():
    d, m, s = 2, 2, 3
    P = LPresentation(d, m, s)
    order = [(i, j) for i in range(d) for j in range(s)]
    for (i, j), (i2, j2) in zip(order, order[1:]):
        assert P.index(i2, j2) == P.index(i, j) + 1
        assert P.phi(g(i, j)) == g(i2, j2)


def test_theta_examples():
    d, m, s = 2, 2, 2
    for i_prime in range(d):
        for i in range(d):
            assert apply_theta(i_prime, g(i, 0), d, m, s) == g(i, 0)
    x = g(1, 1)
    assert apply_theta(1, x, d, m, s) == x * x.conj(g(1, 0))
    assert apply_theta(0, x, d, m, s) == x * x.conj(g(0, 0, m))
    with pytest.raises(InputError):
        apply_theta(2, x, d, m, s)


# --- relators ---------------------------------------------------------------------------


def test_base_relators_shape():
    P = LPresentation(2, 3, 2)
    rel = relators(P, 0, 0)
    expected = set(P.Q())
    for k in (1, 2):
        for i in range(2):
            for i2 in range(2):
                expected.add(comm(g(i, 1), g(i2, 1).conj(g(0, 0, k))))
    assert set(rel) == expected


def test_phi_squared_table_shape():
    d, m, s = 3, 2, 4
    P = LPresentation(d, m, s)
    for i in range(d):
        for i2 in range(d - 1):
            for j in range(s - 2):
                w = comm(g(i, j), g(i2, s - 1))
                assert P.phi(P.phi(w)) == comm(g(i, j + 2), g(i2 + 1, 1))


def test_relator_count_basilica():
    P = LPresentation(1, 2, 2)
    rel = relators(P, 3, 1)
    assert 0 < len(rel) == len(set(rel))
    assert all(w == w.reduced() and w.letters for w in rel)
    assert len(relators_by_depth(P, 3, 1)) == 4


def test_relators_evaluate_to_identity_in_basilica(basilica):
    P = LPresentation(1, 2, 2)
    assert verify_relators(basilica, relators(P, 4, 2))
    assert verify_relators(basilica, [comm(g(0, 1), g(0, 1).conj(g(0, 0)))])


@pytest.mark.parametrize("d,m,s", [(1, 2, 3), (1, 3, 2), (2, 2, 2)])
def test_relators_evaluate_to_identity(d, m, s):
    B = zoo.generalised_basilica(d, m, s)
    assert verify_relators(B, relators(LPresentation(d, m, s), 4, 1))


def test_corrupted_relator_is_detected(basilica):
    bad = comm(g(0, 0), g(0, 1))
    assert not verify_relators(basilica, [bad])
    assert failing_relators(basilica, [comm(g(0, 1), g(0, 1)), bad]) == [bad]


def test_abelianization_check():
    P = LPresentation(2, 2, 3)
    assert abelianization_check(P, 4, 1)
    assert not abelianization_check(P, 0, 0, extra=[g(0, 0)])


# --- Theta images ---------------------------------------------------------------------------


@pytest.mark.parametrize("d,m,s", [(1, 2, 2), (1, 2, 3), (1, 3, 2)])
def test_theta_images_of_base_relators_single_odometer(d, m, s):
    P = LPresentation(d, m, s)
    B = zoo.generalised_basilica(d, m, s)
    base = relators(P, 0, 1)
    once = [P.theta(0, w) for w in base]
    assert verify_relators(B, once)
    assert verify_relators(B, [P.theta(0, w) for w in once])
    assert verify_relators(B, [P.phi(w) for w in once])


def test_theta_images_of_phi_images_can_fail(basilica):
    # frozen from machine evaluation: Theta_0 of Phi(R) is not always trivial
    P = LPresentation(1, 2, 2)
    layer = relators_by_depth(P, 1, 1)[1]
    assert len(failing_relators(basilica, [P.theta(0, w) for w in layer])) == 3


def test_theta_images_for_two_odometers():
    # frozen from machine evaluation: R survives every Theta_i, but the commutators
    # [a_{0,j}, a_{1,j}] with j >= 1 do not
    P = LPresentation(2, 2, 2)
    B = zoo.generalised_basilica(2, 2, 2)
    for i_prime in range(2):
        assert verify_relators(B, [P.theta(i_prime, w) for w in P.R(1)])
        failing = failing_relators(B, [P.theta(i_prime, w) for w in P.Q()])
        assert [w for w in P.Q() if P.theta(i_prime, w) in failing] == [comm(g(0, 1), g(1, 1))]


# --- class-2 collection ------------------------------------------------------------------------


def test_collect_commutator_is_unit_vector():
    d, s = 2, 2
    n = d * s
    idx = pair_index(n)
    for a in range(n):
        for b in range(a + 1, n):
            ya, yb = g(*divmod(a, s)), g(*divmod(b, s))
            c = collect(comm(ya, yb), d, s)
            assert c.exps == (0,) * n
            expected = [0] * len(idx)
            expected[idx[(a, b)]] = 1
            assert list(c.comms) == expected


@given(free_words(2, 2), free_words(2, 2))
def test_collect_is_multiplicative(w1, w2):
    assert collect(w1 * w2, 2, 2) == collect(w1, 2, 2) * collect(w2, 2, 2)


@given(free_words(2, 3), st.integers(0, 10**6))
def test_collect_matches_heisenberg_images(w, seed):
    images = random_heisenberg_images(6, random.Random(seed))
    c = collect(w, 2, 3)
    assert heis_word(w.letters, images, 3) == heis_normal_form(c.exps, c.comms, images)


def test_class2_identity():
    e = Class2Element.identity(3)
    x = Class2Element.generator(3, 1, 2)
    assert e * x == x * e == x


# --- lattices and invariants -----------------------------------------------------------------


def test_int_lattice():
    lat = IntLattice(3)
    assert lat.add([2, 0, 0])
    assert lat.add([0, 4, 2])
    assert not lat.add([2, 4, 2])
    assert lat.contains([4, -4, -2])
    assert not lat.contains([1, 0, 0])
    assert lat.add([3, 0, 0])
    assert lat.contains([1, 0, 0])
    assert lat.rank == 2


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_invariants_match_smith_oracle(r, n, data):
    rows = data.draw(st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                              min_size=r, max_size=r))
    assert abelian_invariants(rows, n) == invariants_from_diagonal(smith_diagonal(rows, n), n)


def test_invariants_examples():
    assert abelian_invariants([[2, 0], [0, 4]], 2) == ([2, 4], 0)
    assert abelian_invariants([[2, 4]], 2) == ([2], 1)
    assert abelian_invariants([], 3) == ([], 3)


# --- gamma_2 / gamma_3 -----------------------------------------------------------------------


def test_class2_basilica():
    q = class2_quotient(LPresentation(1, 2, 2), 2, 1)
    assert q.torsion == () and q.free_rank == 1


def test_class2_delay_three():
    q = class2_quotient(LPresentation(1, 2, 3), 4, 1)
    assert q.torsion == (2, 4) and q.free_rank == 0
    assert q.torsion_order == 2 ** 3


def test_class2_two_odometers_delay_three():
    q = class2_quotient(LPresentation(2, 3, 3), 4, 1)
    assert q.torsion == (3, 3, 3, 3, 9) and q.free_rank == 0
    assert q.torsion_order == 3 ** 6


@pytest.mark.parametrize("d,m", [(2, 2), (2, 3), (3, 2)])
def test_class2_delay_two_is_free(d, m):
    q = class2_quotient(LPresentation(d, m, 2), 2, 1)
    assert q.torsion == () and q.free_rank == d * d


def test_class2_requires_stabilisation():
    with pytest.raises(Inconclusive):
        class2_quotient(LPresentation(1, 2, 3), 0, 1)


def test_class2_json():
    q = class2_quotient(LPresentation(1, 2, 3), 4, 1)
    assert q.to_json() == '{"free_rank": 0, "relators": %d, "torsion": [2, 4]}' % q.relator_count


def test_class2_independent_of_v_box():
    P = LPresentation(1, 2, 3)
    assert class2_quotient(P, 4, 1).torsion == class2_quotient(P, 4, 2).torsion
    P = LPresentation(2, 2, 2)
    a, b = class2_quotient(P, 2, 1), class2_quotient(P, 2, 2)
    assert (a.torsion, a.free_rank) == (b.torsion, b.free_rank)


def test_class2_independent_of_relator_order():
    P = LPresentation(1, 2, 3)
    vecs = relator_comm_vectors(P, relators(P, 4, 1))
    shuffled = list(vecs)
    random.Random(7).shuffle(shuffled)
    assert abelian_invariants(vecs, 3) == abelian_invariants(shuffled, 3) == ([2, 4], 0)


def test_phi_stabilization():
    P = LPresentation(1, 2, 3)
    assert not phi_stabilization(P, 0)
    assert not phi_stabilization(P, 3)
    assert phi_stabilization(P, 4)
    assert stabilization_depth(P, 6) == 3
    B = LPresentation(1, 2, 2)
    assert phi_stabilization(B, 0) and phi_stabilization(B, 1)
    assert not phi_stabilization(LPresentation(2, 3, 3), 0)


# --- text format ------------------------------------------------------------------------------


def test_relator_text_round_trip():
    rel = relators(LPresentation(1, 2, 2), 1, 1)
    text = format_relators(rel)
    assert parse_relators(text) == rel
    assert text.splitlines()[0].startswith("a[")


def test_relator_text_errors():
    assert parse_relators("# comment\n\n1\n") == [FreeWord()]
    with pytest.raises(ParseError) as info:
        parse_relators("a[0,0]^1\na[0,0]^2\n")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_relators("b[0,0]^1")
