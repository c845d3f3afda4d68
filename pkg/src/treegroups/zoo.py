"""Constructors for the concrete groups used throughout the library.

The rooted m-cycle is ``sigma: x -> x + 1 (mod m)``.  The m-adic odometer is
``a = sigma (a, id, ..., id)``; for m = 2 this is ``(0 1)(a, id)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .basilica import SpinalTriple, beta, spinal_group
from .errors import InputError
from .tree_core import (
    Automorphism,
    GroupSpec,
    Machine,
    Perm,
    _minimise,
    check_perm,
    from_recursion,
    perm_identity,
    perm_power,
    vertex,
)


def sigma(m: int, e: int = 1) -> Perm:
    return tuple((x + e) % m for x in range(m))


def odometer(m: int, carry: int = 0) -> GroupSpec:
    """The m-adic odometer ``a = sigma (..., a, ...)`` with ``a`` at ``carry``.

    The default ``carry = 0`` gives ``a = sigma (a, id, ..., id)``.  With
    ``carry = m - 1`` the recursion is the usual add-one-with-carry map on
    little-endian m-adic integers.
    """
    if m < 2:
        raise InputError("m must be at least 2")
    if not 0 <= carry < m:
        raise InputError("carry letter out of range")
    secs = [None] * m
    secs[carry] = "a"
    a = from_recursion(m, {"a": (sigma(m), secs)})["a"]
    return GroupSpec(m, ("a",), (a,))


def product_embed(g: Automorphism, d: int, i: int) -> Automorphism:
    """The coordinate embedding ``pi_i`` of g into the d-fold product.

    ``pi_0(g) = g|^ε (pi_{d-1}(g|_x))_x`` and ``pi_i(g) = (pi_{i-1}(g))_x``
    for ``i >= 1``.
    """
    if d < 1 or not 0 <= i < d:
        raise InputError(f"index i={i} out of range for d={d}")
    mach = g.canonical().machine
    m = mach.m
    e = mach.identity_state
    ident = perm_identity(m)
    ID = mach.size * d
    perms = []
    nexts = []
    for q in range(mach.size):
        for k in range(d):
            if q == e:
                perms.append(ident)
                nexts.append([ID] * m)
            elif k == 0:
                perms.append(mach.perms[q])
                nexts.append([ID if t == e else t * d + d - 1 for t in mach.nexts[q]])
            else:
                perms.append(ident)
                nexts.append([q * d + k - 1] * m)
    perms.append(ident)
    nexts.append([ID] * m)
    start = ID if e == 0 else i
    cp, cn, idx = _minimise(m, perms, nexts, start)
    return Automorphism(Machine(m, cp, cn, idx), 0)


def odometer_product(m: int, d: int, carry: int = 0) -> GroupSpec:
    """Generators ``pi_i(a)``, i = 0..d-1, of the d-fold odometer product."""
    a = odometer(m, carry).generators[0]
    if d == 1:
        return GroupSpec(m, ("a",), (a,))
    return GroupSpec(m, tuple(f"a_{i}" for i in range(d)),
                     tuple(product_embed(a, d, i) for i in range(d)))


def gb_name(i: int, j: int) -> str:
    return f"a_{i}_{j}"


def generalised_basilica(d: int, m: int, s: int, carry: int = 0) -> GroupSpec:
    """Generators ``a_{i,j} = beta^s_j(pi_i(a))`` ordered by ``i*s + j``."""
    if d < 1 or m < 2 or s < 1:
        raise InputError("need d >= 1, m >= 2, s >= 1")
    a = odometer(m, carry).generators[0]
    pairs = []
    for i in range(d):
        pi = product_embed(a, d, i)
        for j in range(s):
            pairs.append((gb_name(i, j), beta(pi, s, j)))
    return GroupSpec.from_pairs(m, pairs)


def finitary(tau: Sequence[int], v: Sequence[int] | str, m: int | None = None) -> Automorphism:
    """The automorphism with label ``tau`` at ``v`` and trivial labels elsewhere."""
    m = len(tau) if m is None else m
    tau = check_perm(tau, m)
    v = vertex(v, m)
    ident = perm_identity(m)
    k = len(v)
    ID = k + 1
    perms = [ident] * k + [tau, ident]
    nexts = []
    for t in range(k):
        row = [ID] * m
        row[v[t]] = t + 1
        nexts.append(row)
    nexts.append([ID] * m)
    nexts.append([ID] * m)
    cp, cn, idx = _minimise(m, perms, nexts, 0)
    return Automorphism(Machine(m, cp, cn, idx), 0)


# ---------------------------------------------------------------------------
# GGS and spinal groups


@dataclass(frozen=True)
class GGSSpec:
    p: int
    e: tuple[int, ...]

    def __post_init__(self):
        if self.p < 2:
            raise InputError("p must be at least 2")
        if len(self.e) != self.p - 1:
            raise InputError(f"defining vector needs {self.p - 1} entries")
        object.__setattr__(self, "e", tuple(int(x) % self.p for x in self.e))

    @property
    def sum_condition(self) -> bool:
        """Whether ``e_1 + ... + e_{p-1} = 0 (mod p)``."""
        return sum(self.e) % self.p == 0

    @property
    def non_symmetric(self) -> bool:
        """Whether ``e_i != e_{p-i}`` for some i."""
        p = self.p
        return any(self.e[i - 1] != self.e[p - i - 1] for i in range(1, p))


def ggs_triple(spec: GGSSpec) -> SpinalTriple:
    p = spec.p
    symbols = tuple(range(p))
    table = {(x, y): (x + y) % p for x in symbols for y in symbols}
    layer = tuple({k: sigma(p, k * spec.e[j - 1]) for k in symbols} for j in range(1, p))
    return SpinalTriple(
        m=p,
        R=(sigma(p),),
        d_symbols=symbols,
        d_identity=0,
        d_table=table,
        omega=(layer,),
        r_names=("a",),
        d_names={k: ("b" if k == 1 else f"b{k}") for k in symbols},
    )


def ggs(spec: GGSSpec | tuple[int, Sequence[int]]) -> GroupSpec:
    """``a = sigma`` and ``b = (b, a^{e_1}, ..., a^{e_{p-1}})``."""
    if not isinstance(spec, GGSSpec):
        spec = GGSSpec(spec[0], tuple(spec[1]))
    p = spec.p
    table = {"a": (sigma(p), [None] * p)}
    secs: list[str | None] = ["b"]
    for x in spec.e:
        if x % p:
            name = f"a{x}"
            table[name] = (sigma(p, x), [None] * p)
            secs.append(name)
        else:
            secs.append(None)
    table["b"] = (perm_identity(p), secs)
    sol = from_recursion(p, table)
    return GroupSpec(p, ("a", "b"), (sol["a"], sol["b"]))


def gupta_sidki(p: int = 3) -> GroupSpec:
    """``b = (b, a, a^-1, id, ..., id)`` on the p-adic tree."""
    if p < 3:
        raise InputError("p must be at least 3")
    e = [0] * (p - 1)
    e[0], e[1] = 1, p - 1
    return ggs(GGSSpec(p, tuple(e)))


def grigorchuk_triple() -> SpinalTriple:
    """D = {1, b, c, d} with the three non-trivial maps to C_2 repeating."""
    swap = (1, 0)
    one = (0, 1)
    symbols = ("1", "b", "c", "d")
    mult = {("1", x): x for x in symbols}
    mult.update({(x, "1"): x for x in symbols})
    for x in "bcd":
        mult[(x, x)] = "1"
        for y in "bcd":
            if x != y:
                (z,) = set("bcd") - {x, y}
                mult[(x, y)] = z
    kills = ("d", "c", "b")  # the generator killed at layers 0, 1, 2 (mod 3)
    omega = []
    for k in kills:
        omega.append(({x: (one if x in ("1", k) else swap) for x in symbols},))
    return SpinalTriple(
        m=2,
        R=(swap,),
        d_symbols=symbols,
        d_identity="1",
        d_table=mult,
        omega=tuple(omega),
        r_names=("a",),
        d_names={x: x for x in symbols},
    )


def grigorchuk() -> GroupSpec:
    """``a = (0 1)``, ``b = (c, a)``, ``c = (d, a)``, ``d = (b, id)``."""
    sol = from_recursion(2, {
        "a": ((1, 0), [None, None]),
        "b": ((0, 1), ["c", "a"]),
        "c": ((0, 1), ["d", "a"]),
        "d": ((0, 1), ["b", None]),
    })
    return GroupSpec(2, ("a", "b", "c", "d"), tuple(sol[n] for n in "abcd"))


def fabrykowski_gupta() -> GroupSpec:
    """``a = (0 1 2)``, ``b = (a, id, b)``."""
    sol = from_recursion(3, {
        "a": (sigma(3), [None, None, None]),
        "b": ((0, 1, 2), ["a", None, "b"]),
    })
    return GroupSpec(3, ("a", "b"), (sol["a"], sol["b"]))


def infinite_dihedral() -> GroupSpec:
    """``sigma = (0 1)`` and ``b = (b, sigma)``."""
    sol = from_recursion(2, {
        "sigma": ((1, 0), [None, None]),
        "b": ((0, 1), ["b", "sigma"]),
    })
    return GroupSpec(2, ("sigma", "b"), (sol["sigma"], sol["b"]))


def gamma_generators(m: int, depth: int) -> GroupSpec:
    """Finitary sigma-labelled elements at every vertex of length < depth."""
    from .tree_core import vertices

    pairs = []
    for k in range(depth):
        for v in vertices(m, k):
            name = "g" + ("_" + "".join(map(str, v)) if v else "")
            pairs.append((name, finitary(sigma(m), v, m)))
    return GroupSpec.from_pairs(m, pairs)


def sigma_power(m: int, e: int) -> Perm:
    return perm_power(sigma(m), e)
