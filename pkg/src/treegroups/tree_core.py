"""Finite-state automorphisms of the m-regular rooted tree.

Vertices are words over the letters 0..m-1, stored as tuples of ints.  An
automorphism is a Mealy machine with a distinguished initial state; every
state carries a root permutation (its label) and one transition per letter
(its first-level sections).

Action convention: automorphisms act on the left, and in a product ``g * h``
the right factor ``h`` acts first.  With this convention

    (g h)(v)    = g(h(v))
    (g h)|_u    = g|_{h(u)} h|_u

Equality is decided by canonical forms: the machine is restricted to the
states reachable from the initial one, minimised by partition refinement and
renumbered breadth-first.  Two automorphisms are equal as tree maps exactly
when their canonical forms coincide.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InputError, ResourceError

Perm = tuple[int, ...]
Vertex = tuple[int, ...]

#: Default bound on the number of states a product machine may reach.
STATE_CAP = 10**6


# ---------------------------------------------------------------------------
# permutations of the alphabet


def perm_identity(m: int) -> Perm:
    return tuple(range(m))


def perm_is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def perm_compose(p: Perm, q: Perm) -> Perm:
    """Return ``p * q``, the permutation applying ``q`` first."""
    return tuple(p[x] for x in q)


def perm_inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def perm_power(p: Perm, e: int) -> Perm:
    if e < 0:
        p, e = perm_inverse(p), -e
    out = perm_identity(len(p))
    for _ in range(e):
        out = perm_compose(p, out)
    return out


def check_perm(p: Sequence[int], m: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != m or sorted(p) != list(range(m)):
        raise InputError(f"not a permutation of 0..{m - 1}: {p}")
    return p


def cycle_perm(m: int, cycles: Iterable[Sequence[int]]) -> Perm:
    """Build the permutation of 0..m-1 given by a product of cycles.

    Cycles are composed right to left, as in ``(0 1)(1 2)``, where ``(1 2)``
    acts first.
    """
    out = perm_identity(m)
    for cyc in cycles:
        cyc = [int(x) for x in cyc]
        if len(set(cyc)) != len(cyc):
            raise InputError(f"repeated point in cycle {tuple(cyc)}")
        img = list(range(m))
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if not 0 <= a < m:
                raise InputError(f"point {a} out of range for alphabet size {m}")
            img[a] = b
        out = perm_compose(out, tuple(img))
    return out


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, m: int) -> Perm:
    """Parse cycle notation such as ``(0 1 2)(3 4)`` or ``()``."""
    stripped = text.strip()
    if not stripped:
        raise InputError("empty permutation")
    cycles = []
    pos = 0
    for match in _CYCLE_RE.finditer(stripped):
        if stripped[pos:match.start()].strip():
            raise InputError(f"malformed cycle notation {text!r}")
        body = match.group(1).replace(",", " ").split()
        try:
            cycles.append([int(x) for x in body])
        except ValueError:
            raise InputError(f"malformed cycle notation {text!r}") from None
        pos = match.end()
    if stripped[pos:].strip():
        raise InputError(f"malformed cycle notation {text!r}")
    return cycle_perm(m, [c for c in cycles if c])


def format_cycles(p: Perm, names: Sequence[str] | None = None) -> str:
    """Cycle notation of ``p``; the identity prints as ``()``."""
    seen = set()
    out = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(names[x] if names else str(x) for x in cyc) + ")")
    return "".join(out) if out else "()"


def vertex(v: str | Sequence[int], m: int | None = None) -> Vertex:
    """Normalise a vertex given as a digit string or a sequence of letters."""
    if isinstance(v, str):
        v = v.strip()
        if v in ("", "e", "ε"):
            return ()
        try:
            word = tuple(int(c) for c in v)
        except ValueError:
            raise InputError(f"bad vertex {v!r}") from None
    else:
        word = tuple(int(x) for x in v)
    if m is not None:
        for x in word:
            if not 0 <= x < m:
                raise InputError(f"letter {x} out of range for alphabet size {m}")
    return word


def format_vertex(v: Vertex) -> str:
    if not v:
        return "ε"
    if all(x < 10 for x in v):
        return "".join(map(str, v))
    return ".".join(map(str, v))


# ---------------------------------------------------------------------------
# machines


@dataclass(frozen=True)
class Machine:
    """A Mealy machine over the alphabet 0..m-1.

    ``perms[q]`` is the root permutation of state ``q`` and ``nexts[q][x]``
    the state reached from ``q`` on reading ``x``.
    """

    m: int
    perms: tuple[Perm, ...]
    nexts: tuple[tuple[int, ...], ...]
    identity_state: int | None = None

    def __post_init__(self):
        if self.m < 2:
            raise InputError("alphabet size must be at least 2")
        if len(self.perms) != len(self.nexts):
            raise InputError("perms and nexts must have the same length")
        n = len(self.perms)
        for q in range(n):
            if len(self.perms[q]) != self.m or len(self.nexts[q]) != self.m:
                raise InputError(f"state {q} has wrong arity")
            for t in self.nexts[q]:
                if not 0 <= t < n:
                    raise InputError(f"state {q} has transition to missing state {t}")
        e = self.identity_state
        if e is not None:
            if not perm_is_identity(self.perms[e]) or any(t != e for t in self.nexts[e]):
                raise InputError("identity_state must be a trivial self-looping state")

    @property
    def size(self) -> int:
        return len(self.perms)


def _reachable(machine: Machine, start: int) -> list[int]:
    order = [start]
    seen = {start}
    for q in order:
        for t in machine.nexts[q]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


def _minimise(m: int, perms: list[Perm], nexts: list[list[int]], start: int):
    """Partition refinement followed by breadth-first renumbering.

    Returns ``(perms, nexts, identity_state)`` of the canonical machine whose
    initial state is 0.
    """
    n = len(perms)
    ident = perm_identity(m)
    keys: dict = {}
    cls = [keys.setdefault(p, len(keys)) for p in perms]
    count = len(keys)
    while True:
        keys = {}
        new = [keys.setdefault((cls[q], tuple(cls[t] for t in nexts[q])), len(keys)) for q in range(n)]
        if len(keys) == count:
            cls = new
            break
        cls, count = new, len(keys)
    rep: dict[int, int] = {}
    for q in range(n):
        rep.setdefault(cls[q], q)
    number = {cls[start]: 0}
    order = [cls[start]]
    for c in order:
        for t in nexts[rep[c]]:
            ct = cls[t]
            if ct not in number:
                number[ct] = len(order)
                order.append(ct)
    out_perms = [perms[rep[c]] for c in order]
    out_nexts = [tuple(number[cls[t]] for t in nexts[rep[c]]) for c in order]
    identity_state = None
    for q, (p, nx) in enumerate(zip(out_perms, out_nexts)):
        if p == ident and all(t == q for t in nx):
            identity_state = q
            break
    if identity_state is None:
        identity_state = len(out_perms)
        out_perms.append(ident)
        out_nexts.append((identity_state,) * m)
    return tuple(out_perms), tuple(out_nexts), identity_state


@dataclass(frozen=True, eq=False)
class Automorphism:
    """A tree automorphism given by a machine and an initial state.

    Instances are immutable.  Comparison and hashing go through the canonical
    form, so ``g == h`` holds exactly when g and h act identically on the tree.
    """

    machine: Machine
    initial: int = 0
    _canon: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.initial < self.machine.size:
            raise InputError("initial state out of range")

    # -- canonical data ------------------------------------------------------

    @property
    def m(self) -> int:
        return self.machine.m

    def canonical(self) -> "Automorphism":
        if not self._canon:
            mach = self.machine
            order = _reachable(mach, self.initial)
            index = {q: i for i, q in enumerate(order)}
            perms = [mach.perms[q] for q in order]
            nexts = [[index[t] for t in mach.nexts[q]] for q in order]
            cp, cn, ident = _minimise(mach.m, perms, nexts, 0)
            if (
                self.initial == 0
                and cp == mach.perms
                and cn == mach.nexts
                and ident == mach.identity_state
            ):
                self._canon.append(self)
            else:
                canon = Automorphism(Machine(mach.m, cp, cn, ident), 0)
                canon._canon.append(canon)
                self._canon.append(canon)
        return self._canon[0]

    def key(self) -> tuple:
        c = self.canonical().machine
        return (c.m, c.perms, c.nexts)

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def num_states(self) -> int:
        """Number of states of the canonical machine, identity state included."""
        return self.canonical().machine.size

    # -- basic maps ------------------------------------------------------------

    @property
    def root_perm(self) -> Perm:
        return self.machine.perms[self.initial]

    def state_at(self, u: Sequence[int]) -> int:
        q = self.initial
        nexts = self.machine.nexts
        for x in vertex(u, self.m):
            q = nexts[q][x]
        return q

    def act(self, v: Sequence[int] | str) -> Vertex:
        v = vertex(v, self.m)
        q = self.initial
        mach = self.machine
        out = []
        for x in v:
            out.append(mach.perms[q][x])
            q = mach.nexts[q][x]
        return tuple(out)

    def section(self, u: Sequence[int] | str) -> "Automorphism":
        return Automorphism(self.machine, self.state_at(u)).canonical()

    def label(self, u: Sequence[int] | str) -> Perm:
        return self.machine.perms[self.state_at(u)]

    def is_identity(self) -> bool:
        return self.canonical().machine.size == 1

    def decompose(self) -> tuple[Perm, tuple["Automorphism", ...]]:
        return self.root_perm, tuple(self.section((x,)) for x in range(self.m))

    def portrait(self, depth: int) -> "Portrait":
        return portrait(self, depth)

    # -- arithmetic --------------------------------------------------------------

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        return compose(self, other)

    def inverse(self) -> "Automorphism":
        return inverse(self)

    def __invert__(self) -> "Automorphism":
        return inverse(self)

    def __pow__(self, e: int) -> "Automorphism":
        return power(self, e)

    def __repr__(self):
        c = self.canonical().machine
        return f"Automorphism(m={c.m}, states={c.size}, root={format_cycles(c.perms[0])})"


@dataclass(frozen=True)
class Portrait:
    """Labels of an automorphism at every vertex of length below ``depth``."""

    m: int
    depth: int
    labels: dict

    def __str__(self):
        return format_portrait(self)


@dataclass(frozen=True)
class GroupSpec:
    """An alphabet size together with named generating automorphisms."""

    m: int
    names: tuple[str, ...]
    generators: tuple[Automorphism, ...]

    def __post_init__(self):
        if len(self.names) != len(self.generators):
            raise InputError("names and generators differ in length")
        if len(set(self.names)) != len(self.names):
            raise InputError("generator names must be unique")
        for g in self.generators:
            if g.m != self.m:
                raise InputError("generators must share the alphabet")

    @classmethod
    def from_pairs(cls, m: int, pairs: Iterable[tuple[str, Automorphism]]) -> "GroupSpec":
        pairs = list(pairs)
        return cls(m, tuple(n for n, _ in pairs), tuple(g for _, g in pairs))

    def __getitem__(self, name: str) -> Automorphism:
        try:
            return self.generators[self.names.index(name)]
        except ValueError:
            raise InputError(f"unknown generator {name!r}") from None

    def __len__(self):
        return len(self.generators)

    def items(self):
        return zip(self.names, self.generators)


# ---------------------------------------------------------------------------
# constructors


def identity(m: int) -> Automorphism:
    ident = perm_identity(m)
    return Automorphism(Machine(m, (ident,), ((0,) * m,), 0), 0)


def rooted(p: Sequence[int]) -> Automorphism:
    """The automorphism with root label ``p`` and trivial sections."""
    m = len(p)
    p = check_perm(p, m)
    ident = perm_identity(m)
    return Automorphism(Machine(m, (p, ident), ((1,) * m, (1,) * m), 1), 0).canonical()


class _Builder:
    """Accumulates states of several machines into one."""

    def __init__(self, m: int):
        self.m = m
        self.perms: list[Perm] = []
        self.nexts: list[list[int]] = []

    def add_state(self, perm: Perm, nexts: Sequence[int] | None = None) -> int:
        self.perms.append(tuple(perm))
        self.nexts.append(list(nexts) if nexts is not None else [0] * self.m)
        return len(self.perms) - 1

    def add_automorphism(self, g: Automorphism) -> int:
        if g.m != self.m:
            raise InputError("alphabet mismatch")
        c = g.canonical().machine
        off = len(self.perms)
        for p, nx in zip(c.perms, c.nexts):
            self.perms.append(p)
            self.nexts.append([t + off for t in nx])
        return off

    def build(self, initial: int) -> Automorphism:
        perms, nexts, ident = _minimise(self.m, self.perms, self.nexts, initial)
        return Automorphism(Machine(self.m, perms, nexts, ident), 0)


def from_wreath(p: Sequence[int], sections: Sequence[Automorphism]) -> Automorphism:
    """The automorphism ``p (s_0, ..., s_{m-1})``."""
    m = len(sections)
    p = check_perm(p, m)
    b = _Builder(m)
    root = b.add_state(p)
    b.nexts[root] = [b.add_automorphism(s) for s in sections]
    return b.build(root)


def from_recursion(
    m: int,
    table: dict[str, tuple[Sequence[int], Sequence[str | None]]],
) -> dict[str, Automorphism]:
    """Solve a finite system of wreath recursions.

    ``table[name] = (perm, (s_0, ..., s_{m-1}))`` where each ``s_x`` is the
    name of another entry or ``None`` for the identity.
    """
    names = list(table)
    index = {n: i for i, n in enumerate(names)}
    ident = len(names)
    perms = []
    nexts = []
    for n in names:
        p, secs = table[n]
        if len(secs) != m:
            raise InputError(f"{n}: expected {m} sections, got {len(secs)}")
        perms.append(check_perm(p, m))
        row = []
        for s in secs:
            if s is None:
                row.append(ident)
            elif s in index:
                row.append(index[s])
            else:
                raise InputError(f"{n}: unknown name {s!r}")
        nexts.append(tuple(row))
    perms.append(perm_identity(m))
    nexts.append((ident,) * m)
    mach = Machine(m, tuple(perms), tuple(nexts), ident)
    return {n: Automorphism(mach, index[n]).canonical() for n in names}


# ---------------------------------------------------------------------------
# operations


def act(g: Automorphism, v: Sequence[int] | str) -> Vertex:
    return g.act(v)


def section(g: Automorphism, u: Sequence[int] | str) -> Automorphism:
    return g.section(u)


def label(g: Automorphism, u: Sequence[int] | str) -> Perm:
    return g.label(u)


def canonicalize(g: Automorphism) -> Automorphism:
    return g.canonical()


def is_identity(g: Automorphism) -> bool:
    return g.is_identity()


def decompose(g: Automorphism) -> tuple[Perm, tuple[Automorphism, ...]]:
    return g.decompose()


def compose(g: Automorphism, h: Automorphism, state_cap: int = STATE_CAP) -> Automorphism:
    """The product ``g * h`` (``h`` acts first), canonicalised."""
    if g.m != h.m:
        raise InputError(f"alphabet mismatch: {g.m} vs {h.m}")
    m = g.m
    G = g.canonical().machine
    H = h.canonical().machine
    if G.size == 1:
        return h.canonical()
    if H.size == 1:
        return g.canonical()
    index = {(0, 0): 0}
    order = [(0, 0)]
    perms = []
    nexts = []
    for p, q in order:
        gp, hq = G.perms[p], H.perms[q]
        perms.append(tuple(gp[hq[x]] for x in range(m)))
        row = []
        for x in range(m):
            t = (G.nexts[p][hq[x]], H.nexts[q][x])
            i = index.get(t)
            if i is None:
                i = index[t] = len(order)
                order.append(t)
                if len(order) > state_cap:
                    raise ResourceError(f"product machine exceeds {state_cap} states")
            row.append(i)
        nexts.append(row)
    cp, cn, ident = _minimise(m, perms, nexts, 0)
    return Automorphism(Machine(m, cp, cn, ident), 0)


def inverse(g: Automorphism) -> Automorphism:
    mach = g.canonical().machine
    perms = []
    nexts = []
    for p, nx in zip(mach.perms, mach.nexts):
        pinv = perm_inverse(p)
        perms.append(pinv)
        nexts.append([nx[pinv[y]] for y in range(mach.m)])
    cp, cn, ident = _minimise(mach.m, perms, nexts, 0)
    return Automorphism(Machine(mach.m, cp, cn, ident), 0)


def power(g: Automorphism, e: int) -> Automorphism:
    if e < 0:
        g, e = inverse(g), -e
    result = identity(g.m)
    base = g
    while e:
        if e & 1:
            result = compose(result, base)
        e >>= 1
        if e:
            base = compose(base, base)
    return result


def commutator(g: Automorphism, h: Automorphism) -> Automorphism:
    """``[g, h] = g^-1 h^-1 g h``."""
    return compose(compose(inverse(g), inverse(h)), compose(g, h))


def conjugate(g: Automorphism, h: Automorphism) -> Automorphism:
    """``g^h = h^-1 g h``."""
    return compose(compose(inverse(h), g), h)


def product(elements: Iterable[Automorphism], m: int) -> Automorphism:
    out = identity(m)
    for g in elements:
        out = compose(out, g)
    return out


def vertices(m: int, n: int) -> list[Vertex]:
    """All words of length n, lexicographically ordered."""
    out: list[Vertex] = [()]
    for _ in range(n):
        out = [v + (x,) for v in out for x in range(m)]
    return out


def portrait(g: Automorphism, depth: int) -> Portrait:
    if depth < 0:
        raise InputError("depth must be non-negative")
    mach = g.machine
    labels = {}
    layer = [((), g.initial)]
    for _ in range(depth):
        nxt = []
        for u, q in layer:
            labels[u] = mach.perms[q]
            nxt.extend((u + (x,), mach.nexts[q][x]) for x in range(g.m))
        layer = nxt
    return Portrait(g.m, depth, labels)


def format_portrait(p: Portrait, skip_identity: bool = False) -> str:
    lines = []
    for u in sorted(p.labels, key=lambda w: (len(w), w)):
        lab = p.labels[u]
        if skip_identity and perm_is_identity(lab):
            continue
        lines.append(f"{format_vertex(u)}: {format_cycles(lab)}")
    return "\n".join(lines)


def to_dot(g: Automorphism, name: str = "g", state_names: Sequence[str] | None = None) -> str:
    """Graphviz description of the canonical machine of ``g``.

    Nodes are states labelled by their root permutation; an edge from ``q``
    to ``t`` labelled ``x:y`` means that ``q`` reads ``x``, writes ``y`` and
    moves to ``t``.
    """
    mach = g.canonical().machine
    names = list(state_names) if state_names else [
        "id" if q == mach.identity_state else f"q{q}" for q in range(mach.size)
    ]
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;"]
    for q in range(mach.size):
        shape = "doublecircle" if q == 0 else "circle"
        lines.append(
            f'  s{q} [label="{names[q]}\\n{format_cycles(mach.perms[q])}", shape={shape}];'
        )
    for q in range(mach.size):
        edges: dict[int, list[str]] = {}
        for x in range(mach.m):
            edges.setdefault(mach.nexts[q][x], []).append(f"{x}:{mach.perms[q][x]}")
        for t, labs in edges.items():
            lines.append(f'  s{q} -> s{t} [label="{", ".join(labs)}"];')
    lines.append("}")
    return "\n".join(lines)


def _dot_id(name: str) -> str:
    return name if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) else f'"{name}"'
