"""The Basilica operation.

``beta(g, s, i)`` spreads the portrait of ``g`` over every s-th layer of the
tree, starting at layer ``i``: the label of ``g`` at ``x_0 ... x_{k-1}`` moves
to the vertex ``0^i x_0 0^{s-1} x_1 ... 0^{s-1} x_{k-1}`` and every other
label becomes trivial.  As wreath recursions,

    beta_i(g) = (beta_{i-1}(g), id, ..., id)                  for i >= 1
    beta_0(g) = g|^ε (beta_{s-1}(g|_0), ..., beta_{s-1}(g|_{m-1}))

The s-th Basilica group of G is generated by all beta_i(g) for g in a
generating set of G and 0 <= i < s.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InputError
from .tree_core import (
    Automorphism,
    GroupSpec,
    Machine,
    Perm,
    Vertex,
    _minimise,
    check_perm,
    perm_compose,
    perm_identity,
    perm_inverse,
    perm_is_identity,
    vertex,
)


def beta(g: Automorphism, s: int, i: int) -> Automorphism:
    """The delayed copy ``beta^s_i(g)`` as a direct machine transformation.

    States are pairs ``(q, j)``: ``(q, 0)`` carries the label of q and moves
    on letter x to ``(next_x(q), s-1)``; for ``j >= 1`` the state ``(q, j)``
    is unlabelled, moves on 0 to ``(q, j-1)`` and on any other letter to the
    identity.  Targets that are the identity state of g are sent straight to
    the identity, so the canonical size is at most ``s * |g| + 1``.
    """
    if s < 1:
        raise InputError("s must be at least 1")
    if not 0 <= i < s:
        raise InputError(f"phase i={i} out of range for s={s}")
    mach = g.canonical().machine
    m = mach.m
    e = mach.identity_state
    ident = perm_identity(m)
    # state (q, j) -> q * s + j ; the identity is the extra last state
    n = mach.size * s
    ID = n
    perms: list[Perm] = []
    nexts: list[list[int]] = []
    for q in range(mach.size):
        for j in range(s):
            if q == e:
                perms.append(ident)
                nexts.append([ID] * m)
            elif j == 0:
                perms.append(mach.perms[q])
                nexts.append([
                    ID if t == e else t * s + (s - 1) for t in mach.nexts[q]
                ])
            else:
                perms.append(ident)
                nexts.append([q * s + j - 1] + [ID] * (m - 1))
    perms.append(ident)
    nexts.append([ID] * m)
    start = ID if mach.identity_state == 0 else i
    cp, cn, idx = _minimise(m, perms, nexts, start)
    return Automorphism(Machine(m, cp, cn, idx), 0)


def bp_generators(G: GroupSpec, s: int) -> GroupSpec:
    """Generators of the s-th Basilica group of G.

    Each generator ``g`` yields ``g_0, ..., g_{s-1}``; for ``s = 1`` the
    names are left unchanged.
    """
    if s == 1:
        return G
    pairs = []
    for name, g in G.items():
        for i in range(s):
            pairs.append((f"{name}_{i}", beta(g, s, i)))
    return GroupSpec.from_pairs(G.m, pairs)


def omega_embed(i: int, s: int, v: Sequence[int] | str) -> Vertex:
    """The vertex ``0^i x_0 0^{s-1} x_1 ... 0^{s-1} x_{k-1}``."""
    if not 0 <= i < s:
        raise InputError(f"phase i={i} out of range for s={s}")
    v = vertex(v)
    if not v:
        return ()
    out = [0] * i
    for k, x in enumerate(v):
        if k:
            out.extend([0] * (s - 1))
        out.append(x)
    return tuple(out)


def omega_preimage(i: int, s: int, u: Sequence[int] | str) -> Vertex | None:
    """Inverse of :func:`omega_embed`, or ``None`` when u is not in its image."""
    u = vertex(u)
    if not u:
        return ()
    if len(u) <= i or (len(u) - 1 - i) % s:
        return None
    if any(u[t] for t in range(i)):
        return None
    out = []
    for pos in range(i, len(u), s):
        out.append(u[pos])
        if pos + s <= len(u) - 1 and any(u[pos + 1:pos + s]):
            return None
    return tuple(out)


def label_vertex(i: int, s: int, v: Sequence[int] | str) -> Vertex:
    """Where the label of g at v sits in the portrait of ``beta(g, s, i)``.

    This is ``0^i x_0 0^{s-1} x_1 0^{s-1} ... x_{k-1} 0^{s-1}``, that is
    ``omega_embed(i, s, v)`` followed by ``0^{s-1}`` when v is non-empty and
    ``0^i`` for the root.  Every other vertex carries the identity label.
    """
    if not 0 <= i < s:
        raise InputError(f"phase i={i} out of range for s={s}")
    out = [0] * i
    for x in vertex(v):
        out.append(x)
        out.extend([0] * (s - 1))
    return tuple(out)


def label_preimage(i: int, s: int, u: Sequence[int] | str) -> Vertex | None:
    """Inverse of :func:`label_vertex`, or ``None`` when u is not in its image."""
    if not 0 <= i < s:
        raise InputError(f"phase i={i} out of range for s={s}")
    u = vertex(u)
    if len(u) < i or (len(u) - i) % s or any(u[:i]):
        return None
    out = []
    for pos in range(i, len(u), s):
        if any(u[pos + 1:pos + s]):
            return None
        out.append(u[pos])
    return tuple(out)


# ---------------------------------------------------------------------------
# re-rooting onto the alphabet X^s


def word_index(w: Sequence[int], m: int, order: str = "lex") -> int:
    """Position of the word ``w`` in X^s for the given letter ordering."""
    if order == "lex":
        idx = 0
        for x in w:
            idx = idx * m + x
        return idx
    if order == "revlex":
        idx = 0
        for x in reversed(w):
            idx = idx * m + x
        return idx
    raise InputError(f"unknown ordering {order!r}")


def index_word(idx: int, m: int, s: int, order: str = "lex") -> Vertex:
    digits = []
    for _ in range(s):
        digits.append(idx % m)
        idx //= m
    if order == "lex":
        return tuple(reversed(digits))
    if order == "revlex":
        return tuple(digits)
    raise InputError(f"unknown ordering {order!r}")


def power_alphabet_perm(g: Automorphism, s: int, order: str = "lex") -> Perm:
    """The action of g on X^s written as a permutation of 0..m^s-1."""
    m = g.m
    out = [0] * m**s
    for idx in range(m**s):
        w = index_word(idx, m, s, order)
        out[idx] = word_index(g.act(w), m, order)
    return tuple(out)


def on_power_alphabet(g: Automorphism, s: int, order: str = "lex") -> Automorphism:
    """The automorphism of the m^s-regular tree induced by g on layers sn."""
    if s < 1:
        raise InputError("s must be at least 1")
    mach = g.canonical().machine
    m = mach.m
    M = m**s
    words = [index_word(idx, m, s, order) for idx in range(M)]
    perms = []
    nexts = []
    index = {0: 0}
    order_states = [0]
    for q in order_states:
        p = [0] * M
        row = []
        for idx, w in enumerate(words):
            state = q
            img = []
            for x in w:
                img.append(mach.perms[state][x])
                state = mach.nexts[state][x]
            p[idx] = word_index(img, m, order)
            if state not in index:
                index[state] = len(order_states)
                order_states.append(state)
            row.append(index[state])
        perms.append(tuple(p))
        nexts.append(row)
    cp, cn, ident = _minimise(M, perms, nexts, 0)
    return Automorphism(Machine(M, cp, cn, ident), 0)


# ---------------------------------------------------------------------------
# spinal groups


@dataclass(frozen=True)
class SpinalTriple:
    """A defining triple (R, D, omega) of a spinal group.

    ``D`` is a finite group on the symbols ``d_symbols`` with multiplication
    table ``d_table[(x, y)] = x*y``; ``d_identity`` is its neutral symbol.
    ``omega[n % len(omega)][j - 1][d]`` is the permutation placed by the
    directed element ``d`` at the vertex ``0^n j`` (n >= 0, 1 <= j < m).
    """

    m: int
    R: tuple[Perm, ...]
    d_symbols: tuple
    d_identity: object
    d_table: dict
    omega: tuple
    r_names: tuple[str, ...] = field(default=())
    d_names: dict = field(default_factory=dict)

    @property
    def period(self) -> int:
        return len(self.omega)

    def omega_at(self, n: int, j: int, d) -> Perm:
        return self.omega[n % self.period][j - 1][d]

    def check(self) -> list[str]:
        """Problems with the defining conditions, checked over one period."""
        problems = []
        if not _transitive(self.m, self.R):
            problems.append("R is not transitive")
        for n in range(self.period):
            imgs = [self.omega_at(n, j, d) for j in range(1, self.m) for d in self.d_symbols]
            if not _transitive(self.m, imgs):
                problems.append(f"omega images at layer {n} are not transitive")
            for j in range(1, self.m):
                for x in self.d_symbols:
                    for y in self.d_symbols:
                        lhs = self.omega_at(n, j, self.d_table[(x, y)])
                        rhs = perm_compose(self.omega_at(n, j, x), self.omega_at(n, j, y))
                        if lhs != rhs:
                            problems.append(f"omega_{n},{j} is not a homomorphism")
        for n in range(self.period):
            kernel = set(self.d_symbols)
            for k in range(self.period):
                for j in range(1, self.m):
                    kernel &= {d for d in self.d_symbols
                               if perm_is_identity(self.omega_at(n + k, j, d))}
            if kernel != {self.d_identity}:
                problems.append(f"kernel intersection from layer {n} is not trivial")
        return problems


def _transitive(m: int, perms: Sequence[Perm]) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for p in perms:
            if p[x] not in seen:
                seen.add(p[x])
                stack.append(p[x])
    return len(seen) == m


def tau(rho: Perm, i: int, s: int, order: str = "lex") -> Perm:
    """The rooted permutation ``rho`` placed at ``0^i``, acting on X^s."""
    m = len(rho)
    out = []
    for idx in range(m**s):
        w = list(index_word(idx, m, s, order))
        if all(x == 0 for x in w[:i]):
            w[i] = rho[w[i]]
        out.append(word_index(w, m, order))
    return tuple(out)


def spinal_bp_triple(t: SpinalTriple, s: int, order: str = "lex") -> SpinalTriple:
    """Defining triple of the s-th Basilica group re-rooted on X^s.

    R becomes the iterated wreath product generated by ``tau_k(R)``, D
    becomes D^s, and the directed element ``(d_0, ..., d_{s-1})`` places
    ``tau_i(omega_{n,x}(d_i))`` at the letter ``0^i x 0^{s-i-1}`` of X^s.
    """
    if s == 1:
        return t
    m = t.m
    M = m**s
    R = []
    r_names = []
    for k in range(s):
        for idx, r in enumerate(t.R):
            R.append(tau(r, k, s, order))
            base = t.r_names[idx] if t.r_names else f"r{idx}"
            r_names.append(f"{base}_{k}")
    symbols = tuple(itertools.product(t.d_symbols, repeat=s))
    table = {
        (x, y): tuple(t.d_table[(a, b)] for a, b in zip(x, y))
        for x in symbols for y in symbols
    }
    ident_perm = perm_identity(M)
    omega = []
    for n in range(t.period):
        layer = []
        for J in range(1, M):
            w = index_word(J, m, s, order)
            nz = [k for k, x in enumerate(w) if x]
            images = {}
            for d in symbols:
                if len(nz) == 1:
                    i = nz[0]
                    images[d] = tau(t.omega_at(n, w[i], d[i]), i, s, order)
                else:
                    images[d] = ident_perm
            layer.append(images)
        omega.append(tuple(layer))
    d_names = {}
    for d in symbols:
        parts = [f"{t.d_names.get(x, x)}_{k}" for k, x in enumerate(d) if x != t.d_identity]
        d_names[d] = "*".join(parts) if parts else "e"
    return SpinalTriple(
        m=M,
        R=tuple(R),
        d_symbols=symbols,
        d_identity=(t.d_identity,) * s,
        d_table=table,
        omega=tuple(omega),
        r_names=tuple(r_names),
        d_names=d_names,
    )


def directed_element(t: SpinalTriple, d, start: int = 0) -> Automorphism:
    """The directed automorphism of ``d`` read from layer ``start`` onwards."""
    m = t.m
    ident = perm_identity(m)
    # states: directed (n mod period) for n = start.., rooted label states, identity
    perms: list[Perm] = []
    nexts: list[list[int]] = []
    P = t.period
    rooted_index: dict[Perm, int] = {}
    ID = 0
    perms.append(ident)
    nexts.append([ID] * m)

    def rooted_state(p: Perm) -> int:
        if perm_is_identity(p):
            return ID
        if p not in rooted_index:
            rooted_index[p] = len(perms)
            perms.append(p)
            nexts.append([ID] * m)
        return rooted_index[p]

    directed = {}
    for k in range(P):
        directed[k] = len(perms)
        perms.append(ident)
        nexts.append([ID] * m)
    for k in range(P):
        n = start + k
        row = [directed[(k + 1) % P]]
        for j in range(1, m):
            row.append(rooted_state(t.omega_at(n, j, d)))
        nexts[directed[k]] = row
    cp, cn, idx = _minimise(m, perms, nexts, directed[0])
    return Automorphism(Machine(m, cp, cn, idx), 0)


def spinal_group(t: SpinalTriple) -> GroupSpec:
    """Rooted generators from R together with every non-trivial directed element."""
    pairs = []
    from .tree_core import rooted

    for idx, r in enumerate(t.R):
        name = t.r_names[idx] if t.r_names else f"r{idx}"
        pairs.append((name, rooted(r)))
    for d in t.d_symbols:
        if d == t.d_identity:
            continue
        name = str(t.d_names.get(d, d))
        pairs.append((name, directed_element(t, d)))
    return GroupSpec.from_pairs(t.m, pairs)


def label_is_sigma_power(p: Perm) -> bool:
    """True when ``p`` is a rotation ``x -> x + e (mod m)``."""
    m = len(p)
    e = p[0]
    return all(p[x] == (x + e) % m for x in range(m))


__all__ = [
    "beta",
    "bp_generators",
    "omega_embed",
    "omega_preimage",
    "label_vertex",
    "label_preimage",
    "on_power_alphabet",
    "power_alphabet_perm",
    "SpinalTriple",
    "spinal_bp_triple",
    "spinal_group",
    "directed_element",
    "tau",
    "word_index",
    "index_word",
    "label_is_sigma_power",
    "check_perm",
    "perm_inverse",
]
