"""Group-level computations for finitely generated groups of tree automorphisms.

Everything that needs the whole group works at a finite level n, where the
group is replaced by its image ``G_n`` in Sym(X^n).  Points of X^n are words
numbered lexicographically.  Properties such as fractalness are therefore
always reported "at level n"; the infinite statements are never claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import permgroups as pg
from .basilica import beta
from .errors import Inconclusive, InputError, ResourceError
from .tree_core import (
    Automorphism,
    GroupSpec,
    Vertex,
    compose,
    identity,
    inverse,
    power,
    vertex,
)

Word = Sequence[tuple[str | int, int]]


# ---------------------------------------------------------------------------
# permutation images


def level_perm(g: Automorphism, n: int) -> np.ndarray:
    """The permutation of X^n induced by g, as an image array."""
    if n < 0:
        raise InputError("level must be non-negative")
    mach = g.machine
    m = mach.m
    cur = [np.zeros(1, dtype=pg.DTYPE) for _ in range(mach.size)]
    for k in range(1, n + 1):
        step = m ** (k - 1)
        cur = [
            np.concatenate([mach.perms[q][x] * step + cur[mach.nexts[q][x]] for x in range(m)]).astype(pg.DTYPE)
            for q in range(mach.size)
        ]
    return cur[g.initial]


def _check_points(m: int, n: int, point_cap: int):
    if m**n > point_cap:
        raise ResourceError(f"level {n} has {m**n} points, above the cap of {point_cap}")


def _resolve(G: GroupSpec, letter: str | int) -> int:
    if isinstance(letter, str):
        try:
            return G.names.index(letter)
        except ValueError:
            raise InputError(f"unknown generator {letter!r}") from None
    if not 0 <= letter < len(G.generators):
        raise InputError(f"generator index {letter} out of range")
    return letter


def evaluate_word_perm(perms: Sequence[np.ndarray], G: GroupSpec, word: Word) -> np.ndarray:
    """Evaluate a word on level permutations; the rightmost letter acts first."""
    out = np.arange(len(perms[0]) if perms else 1, dtype=pg.DTYPE)
    inverses: dict[int, np.ndarray] = {}
    for letter, e in word:
        i = _resolve(G, letter)
        g = perms[i]
        if e < 0:
            if i not in inverses:
                inverses[i] = pg.inverse_perm(g)
            g = inverses[i]
        for _ in range(abs(e)):
            out = out[g]
    return out


def evaluate_word(G: GroupSpec, word: Word) -> Automorphism:
    """The automorphism represented by a word in the generators of G."""
    out = identity(G.m)
    for letter, e in word:
        out = compose(out, power(G.generators[_resolve(G, letter)], e))
    return out


def word_is_identity(G: GroupSpec, word: Word) -> bool:
    """Decide whether a word in the generators is trivial (exact for finite-state groups)."""
    return evaluate_word(G, word).is_identity()


# ---------------------------------------------------------------------------
# level quotients


class PermGroup:
    """A subgroup of Sym(X^n) generated by permutations.

    The layered p-group engine is used when m is prime and every label of
    every generator is a rotation; otherwise a Schreier-Sims chain on the
    disjoint union of layers 1..n.  Both expose the orders of the layer
    stabilisers St(k), k = 0..n.
    """

    def __init__(self, perms: Sequence[np.ndarray], m: int, n: int, engine: str = "auto",
                 normal_seeds: Sequence[np.ndarray] | None = None):
        self.m = m
        self.n = n
        self.generators = [np.asarray(p, dtype=pg.DTYPE) for p in perms]
        if engine == "auto":
            layered = pg.is_prime(m) and pg.rotation_labelled(self.generators, m, n)
            if normal_seeds is not None:
                layered = layered and pg.rotation_labelled(normal_seeds, m, n)
            engine = "layered" if layered else "schreier-sims"
        self.engine = engine
        seeds = self.generators if normal_seeds is None else list(normal_seeds)
        if engine == "layered":
            if not pg.is_prime(m):
                raise InputError("the layered engine needs a prime alphabet size")
            if not pg.rotation_labelled(list(self.generators) + list(seeds), m, n):
                raise InputError("the layered engine needs every label to be a rotation")
            self._impl = pg.LayeredPGroup(self.generators, seeds, m, n)
            orders = [1]
            for dim in reversed(self._impl.dims):
                orders.append(orders[-1] * m**dim)
            self._stab_orders = list(reversed(orders))
        elif engine == "schreier-sims":
            # work on the disjoint union of layers 1..n, where St(k) is the
            # stabiliser of the first m + ... + m^k base points
            self._prefix = pg.layer_offsets(m, n)
            ext = [pg.to_layer_union(g, m, n) for g in self.generators]
            degree = self._prefix[-1]
            base = list(range(degree))
            if normal_seeds is None:
                self._impl = pg.SchreierSims(ext, degree, base)
            else:
                ext_seeds = [pg.to_layer_union(np.asarray(g, dtype=pg.DTYPE), m, n) for g in seeds]
                self._impl = pg.normal_closure_schreier_sims(ext, ext_seeds, degree, base)
            self._stab_orders = [self._impl.stabilizer_order(self._prefix[k]) for k in range(n + 1)]
        else:
            raise InputError(f"unknown engine {engine!r}")

    @property
    def order(self) -> int:
        return self._stab_orders[0]

    def stabilizer_order(self, k: int) -> int:
        """Order of the subgroup fixing layer k pointwise."""
        return self._stab_orders[k]

    def contains(self, g: np.ndarray) -> bool:
        g = np.asarray(g, dtype=pg.DTYPE)
        if self.engine == "layered":
            return self._impl.contains(g)
        return self._impl.contains(pg.to_layer_union(g, self.m, self.n))

    def stabilizer_generators(self, k: int) -> list[np.ndarray]:
        """Generators of the subgroup fixing layer k."""
        if self.engine == "layered":
            return self._impl.stabilizer_generators(k)
        if k == 0:
            return list(self.generators)
        ext = self._impl.stabilizer_generators(self._prefix[k])
        return [pg.from_layer_union(g, self.m, self.n) for g in ext]


@dataclass
class LevelQuotient:
    """The image of a group in Sym(X^n), with exact orders.

    ``level_orders[k]`` is |G / St_G(k)| for k = 0..n and
    ``layer_orders[k]`` is |St_G(k) / St_G(k+1)| for k = 0..n-1.
    """

    m: int
    level: int
    perms: list[np.ndarray]
    group: PermGroup = field(repr=False)

    @property
    def degree(self) -> int:
        return self.m**self.level

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def engine(self) -> str:
        return self.group.engine

    @property
    def level_orders(self) -> list[int]:
        total = self.group.order
        return [total // self.group.stabilizer_order(k) for k in range(self.level + 1)]

    @property
    def layer_orders(self) -> list[int]:
        g = self.group
        return [g.stabilizer_order(k) // g.stabilizer_order(k + 1) for k in range(self.level)]

    def log_order(self) -> Fraction:
        return exact_log(self.order, self.m)

    def contains(self, g: np.ndarray | Automorphism) -> bool:
        if isinstance(g, Automorphism):
            g = level_perm(g, self.level)
        return self.group.contains(g)

    def stabilizer_generators(self, k: int) -> list[np.ndarray]:
        return self.group.stabilizer_generators(k)


def level_perms(G: GroupSpec, n: int, point_cap: int = pg.POINT_CAP) -> list[np.ndarray]:
    _check_points(G.m, n, point_cap)
    return [level_perm(g, n) for g in G.generators]


def level_quotient(G: GroupSpec, n: int, point_cap: int = pg.POINT_CAP, engine: str = "auto") -> LevelQuotient:
    """The level-n congruence quotient of the group generated by G."""
    if n < 0:
        raise InputError("level must be non-negative")
    perms = level_perms(G, n, point_cap)
    return LevelQuotient(G.m, n, perms, PermGroup(perms, G.m, n, engine))


def exact_log(value: int, m: int) -> Fraction:
    """log_m(value) as an exact rational.

    Accepts values whose prime factorisation is proportional to that of m;
    anything else has an irrational logarithm and raises InputError.
    """
    if value < 1:
        raise InputError("logarithm of a non-positive number")
    fac_m = _factor(m)
    exps = {}
    v = value
    for p in fac_m:
        e = 0
        while v % p == 0:
            v //= p
            e += 1
        exps[p] = e
    if v != 1:
        raise InputError(f"log_{m}({value}) is irrational: factor {v} is coprime to {m}")
    ratios = {Fraction(exps[p], fac_m[p]) for p in fac_m}
    if len(ratios) != 1:
        raise InputError(f"log_{m}({value}) is irrational")
    return ratios.pop()


def _factor(m: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


# ---------------------------------------------------------------------------
# transitivity and fractalness


def _orbit(perms: Sequence[np.ndarray], start: int, degree: int) -> np.ndarray:
    seen = np.zeros(degree, dtype=bool)
    seen[start] = True
    frontier = np.array([start])
    while frontier.size:
        images = np.concatenate([p[frontier] for p in perms]) if perms else np.zeros(0, dtype=int)
        images = np.unique(images)
        images = images[~seen[images]]
        seen[images] = True
        frontier = images
    return seen


def is_spherically_transitive(G: GroupSpec, n: int, point_cap: int = pg.POINT_CAP) -> bool:
    """Whether G acts transitively on X^k for every k <= n.

    Transitivity on X^n implies it on every shorter layer.
    """
    perms = level_perms(G, n, point_cap)
    return bool(_orbit(perms, 0, G.m**n).all())


def _same_group(H: Sequence[np.ndarray], K: PermGroup, m: int, n: int) -> bool:
    """Whether <H> equals the group K (H must lie in K and have its order)."""
    if not all(K.contains(h) for h in H):
        return False
    return PermGroup(H, m, n).order == K.order if H else K.order == 1


def _first_layer_transversal(perms: Sequence[np.ndarray], m: int, n: int, x: int):
    """Representatives mapping first-layer vertex x to each vertex of its orbit."""
    step = m ** (n - 1)
    ident = pg.identity_perm(m**n)
    trans = {x: ident}
    queue = [x]
    for y in queue:
        for g in perms:
            z = int(g[y * step] // step)
            if z not in trans:
                trans[z] = g[trans[y]]
                queue.append(z)
    return trans


def vertex_stabilizer_generators(perms: Sequence[np.ndarray], m: int, n: int, x: int) -> list[np.ndarray]:
    """Schreier generators of the stabiliser of the first-layer vertex x."""
    step = m ** (n - 1)
    trans = _first_layer_transversal(perms, m, n, x)
    out = []
    seen = set()
    for y, u in trans.items():
        for g in perms:
            z = int(g[y * step] // step)
            h = pg.inverse_perm(trans[z])[g[u]]
            if pg.is_identity_perm(h):
                continue
            key = h.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(h)
    return out


def _sections_at(gens: Iterable[np.ndarray], m: int, n: int, x: int) -> list[np.ndarray]:
    return [pg.restrict_to_subtree(g, m, n, x) for g in gens]


def is_fractal_at(G: GroupSpec, n: int, point_cap: int = pg.POINT_CAP) -> bool:
    """Whether st_G(x)|_x = G holds in the level-(n-1) quotient for every x in X."""
    if n < 2:
        raise InputError("fractalness is checked at levels n >= 2")
    perms = level_perms(G, n, point_cap)
    target = PermGroup([pg.restrict_to_layer(p, G.m, n, n - 1) for p in perms], G.m, n - 1)
    for x in range(G.m):
        gens = vertex_stabilizer_generators(perms, G.m, n, x)
        if not _same_group(_sections_at(gens, G.m, n, x), target, G.m, n - 1):
            return False
    return True


def is_strongly_fractal_at(G: GroupSpec, n: int, point_cap: int = pg.POINT_CAP) -> bool:
    """Whether St_G(1)|_x = G holds in the level-(n-1) quotient for every x in X."""
    return _stabilizer_sections_match(G, n, 1, point_cap)


def is_very_strongly_fractal_at(G: GroupSpec, n: int, point_cap: int = pg.POINT_CAP) -> bool:
    """Whether St_G(k+1)|_x = St_G(k) in the level-(n-1) quotient for all k < n - 1, x in X."""
    if n < 2:
        raise InputError("fractalness is checked at levels n >= 2")
    return all(_stabilizer_sections_match(G, n, k + 1, point_cap) for k in range(n - 1))


def _stabilizer_sections_match(G: GroupSpec, n: int, k: int, point_cap: int) -> bool:
    if n < 2:
        raise InputError("fractalness is checked at levels n >= 2")
    m = G.m
    Q = level_quotient(G, n, point_cap)
    lower = [pg.restrict_to_layer(p, m, n, n - 1) for p in Q.perms]
    target_all = PermGroup(lower, m, n - 1)
    if k == 1:
        target = target_all
    else:
        target = PermGroup(target_all.stabilizer_generators(k - 1), m, n - 1)
    stab = Q.stabilizer_generators(k)
    for x in range(m):
        if not _same_group(_sections_at(stab, m, n, x), target, m, n - 1):
            return False
    return True


# ---------------------------------------------------------------------------
# self-similarity and contraction


def self_similar_closure(G: GroupSpec, cap: int = 1000) -> GroupSpec:
    """Adjoin first-level sections of generators until closed.

    New elements are named ``NAME|x`` after the element and letter that
    produced them; identity sections are never adjoined.
    """
    names = list(G.names)
    elems = list(G.generators)
    keys = {g.key() for g in elems}
    i = 0
    while i < len(elems):
        g = elems[i]
        for x in range(G.m):
            h = g.section((x,))
            if h.is_identity() or h.key() in keys:
                continue
            if len(elems) >= cap:
                raise ResourceError(f"self-similar closure exceeds {cap} elements")
            keys.add(h.key())
            elems.append(h)
            names.append(f"{names[i]}|{x}")
        i += 1
    return GroupSpec(G.m, tuple(names), tuple(elems))


def express_as_word(G: GroupSpec, g: Automorphism, max_length: int = 3) -> list[tuple[str, int]] | None:
    """A shortest word of length <= max_length in the generators equal to g, or None."""
    target = g.key()
    letters = [(name, e) for name in G.names for e in (1, -1)]
    values = {name: gen for name, gen in G.items()}
    inverses = {name: inverse(gen) for name, gen in G.items()}
    layer: dict[tuple, tuple[Automorphism, list]] = {identity(G.m).key(): (identity(G.m), [])}
    seen = set(layer)
    if target in layer:
        return []
    for _ in range(max_length):
        nxt = {}
        for h, w in layer.values():
            for name, e in letters:
                val = compose(h, values[name] if e == 1 else inverses[name])
                key = val.key()
                if key in seen:
                    continue
                seen.add(key)
                word = w + [(name, e)]
                if key == target:
                    return word
                nxt[key] = (val, word)
        layer = nxt
    return None


def is_self_similar_closed(G: GroupSpec, max_length: int = 2, cap: int = 1000) -> bool:
    """Whether every element of the self-similar closure is a short word in G.

    A True answer proves that the generated group is self-similar; False only
    means that no word of length <= max_length was found.
    """
    closure = self_similar_closure(G, cap)
    return all(express_as_word(G, g, max_length) is not None for g in closure.generators[len(G):])


@dataclass(frozen=True)
class Nucleus:
    m: int
    elements: tuple[Automorphism, ...]

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g: Automorphism) -> bool:
        return g.key() in {e.key() for e in self.elements}

    def keys(self) -> set:
        return {e.key() for e in self.elements}


def cycle_core(g: Automorphism) -> list[Automorphism]:
    """Sections of g that lie on a cycle of its machine, and their sections.

    These are exactly the sections ``g|_v`` that recur at arbitrarily long v,
    so every nucleus of a group containing g contains them.
    """
    c = g.canonical()
    mach = c.machine
    nodes = _reachable_states(mach, c.initial)
    edges = {q: list(mach.nexts[q]) for q in nodes}
    cyclic = set()
    for comp in _sccs(nodes, edges):
        members = set(comp)
        if any(t in members for q in comp for t in edges[q]):
            cyclic.update(comp)
    core = sorted(_closure(cyclic, edges))
    return [Automorphism(mach, q).canonical() for q in core]


def _reachable_states(mach, start: int) -> list[int]:
    seen = {start}
    order = [start]
    for q in order:
        for t in mach.nexts[q]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


def _closure(starts: Iterable[int], edges: dict[int, list[int]]) -> set[int]:
    seen = set(starts)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for t in edges[q]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


NUCLEUS_SIZE_CAP = 300
NUCLEUS_STATE_CAP = 64


def nucleus(G: GroupSpec, rounds_cap: int = 50, size_cap: int = NUCLEUS_SIZE_CAP,
            state_cap: int = NUCLEUS_STATE_CAP) -> Nucleus:
    """The minimal nucleus of a contracting group, by fixed-point iteration.

    Start from the cycle cores of the generators and their inverses (plus the
    identity) and adjoin the cycle cores of all pairwise products until
    nothing new appears.  Raises Inconclusive when a cap is hit (more than
    ``size_cap`` elements, an element with more than ``state_cap`` states, or
    ``rounds_cap`` rounds); contraction is then neither proven nor refuted.
    """
    m = G.m
    elems: dict[tuple, Automorphism] = {identity(m).key(): identity(m)}
    for g in G.generators:
        for h in (g, inverse(g)):
            for c in cycle_core(h):
                elems.setdefault(c.key(), c)
    done_pairs: set[tuple] = set()
    for _ in range(rounds_cap):
        current = list(elems.values())
        new: dict[tuple, Automorphism] = {}
        for x in current:
            for y in current:
                pair = (x.key(), y.key())
                if pair in done_pairs:
                    continue
                done_pairs.add(pair)
                for c in cycle_core(compose(x, y)):
                    k = c.key()
                    if k not in elems and k not in new:
                        if c.num_states > state_cap:
                            raise Inconclusive(f"nucleus candidate with more than {state_cap} states")
                        new[k] = c
                        if len(elems) + len(new) > size_cap:
                            raise Inconclusive(f"nucleus search exceeded {size_cap} elements")
        if not new:
            ordered = sorted(elems.values(), key=lambda g: (g.num_states, g.key()))
            return Nucleus(m, tuple(ordered))
        elems.update(new)
    raise Inconclusive(f"nucleus search did not close within {rounds_cap} rounds")


def nucleus_is_closed(N: Nucleus) -> bool:
    """Post-hoc check of the nucleus property.

    N must be closed under first-level sections, and for all x, y in N every
    section of x y at depth equal to its number of states must lie in N.
    """
    keys = N.keys()
    for x in N.elements:
        if any(x.section((a,)).key() not in keys for a in range(N.m)):
            return False
    for x in N.elements:
        for y in N.elements:
            xy = compose(x, y)
            if not all(h.key() in keys for h in sections_at_depth(xy, xy.num_states)):
                return False
    return True


def sections_at_depth(g: Automorphism, depth: int) -> list[Automorphism]:
    """The distinct sections of g at vertices of length ``depth``."""
    c = g.canonical()
    mach = c.machine
    frontier = {c.initial}
    for _ in range(depth):
        frontier = {t for q in frontier for t in mach.nexts[q]}
    return [Automorphism(mach, q).canonical() for q in sorted(frontier)]


def nucleus_bp_candidate(N: Nucleus, s: int) -> Nucleus:
    """Products of at most s+1 syllables beta^s_j(g) with g in N."""
    if s < 1:
        raise InputError("s must be at least 1")
    if s == 1:
        return N
    syllables = {}
    for g in N.elements:
        for j in range(s):
            b = beta(g, s, j)
            syllables.setdefault(b.key(), b)
    level = {identity(N.m).key(): identity(N.m)}
    out = dict(level)
    for _ in range(s + 1):
        nxt = {}
        for x in level.values():
            for y in syllables.values():
                z = compose(x, y)
                if z.key() not in out:
                    nxt[z.key()] = z
        out.update(nxt)
        level = nxt
    ordered = sorted(out.values(), key=lambda g: (g.num_states, g.key()))
    return Nucleus(N.m, tuple(ordered))


# ---------------------------------------------------------------------------
# activity and boundedness


def _nontrivial_states(g: Automorphism) -> tuple:
    c = g.canonical()
    return c.machine, c.initial, c.machine.identity_state


def activity_sequence(g: Automorphism, N: int) -> list[int]:
    """mu_n = number of vertices of length n with non-trivial section, n = 0..N."""
    mach, start, ident = _nontrivial_states(g)
    counts = {start: 1}
    out = []
    for _ in range(N + 1):
        out.append(sum(c for q, c in counts.items() if q != ident))
        nxt: dict[int, int] = {}
        for q, c in counts.items():
            if q == ident:
                continue
            for t in mach.nexts[q]:
                if t != ident:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return out


def _sccs(nodes: list[int], edges: dict[int, list[int]]) -> list[list[int]]:
    """Strongly connected components (iterative Tarjan)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    stack: list[int] = []
    on_stack: set[int] = set()
    out: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = edges[v]
            if i < len(succ):
                work.append((v, i + 1))
                w = succ[i]
                if w not in index:
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return out


def is_bounded(g: Automorphism) -> bool:
    """Structural boundedness test on the minimal machine.

    Restricted to non-identity states reachable from the initial state, g is
    bounded exactly when every strongly connected component carrying a cycle
    is a single simple cycle (counting parallel edges) and no path leads from
    one such cycle to another.
    """
    mach, start, ident = _nontrivial_states(g)
    nodes = []
    seen = {start} if start != ident else set()
    queue = [start] if start != ident else []
    for q in queue:
        nodes.append(q)
        for t in mach.nexts[q]:
            if t != ident and t not in seen:
                seen.add(t)
                queue.append(t)
    edges = {q: [t for t in mach.nexts[q] if t != ident] for q in nodes}
    comps = _sccs(nodes, edges)
    comp_of = {q: i for i, c in enumerate(comps) for q in c}
    cyclic = []
    for i, comp in enumerate(comps):
        members = set(comp)
        internal = sum(1 for q in comp for t in edges[q] if t in members)
        if internal == 0:
            continue
        if internal != len(comp):
            return False
        cyclic.append(i)
    # no path from one cyclic component to another
    cyc = set(cyclic)
    for c in cyclic:
        stack = [t for q in comps[c] for t in edges[q] if comp_of[t] != c]
        reached = set()
        while stack:
            q = stack.pop()
            if q in reached:
                continue
            reached.add(q)
            if comp_of[q] in cyc:
                return False
            stack.extend(edges[q])
    return True


def bounded_by_activity(g: Automorphism, depth: int = 24) -> bool:
    """Empirical classification: mu_n stays within its early maximum up to ``depth``.

    The sequence counts as bounded when the maximum over the second half of
    0..depth does not exceed the maximum over the first half.
    """
    mu = activity_sequence(g, depth)
    half = (depth + 1) // 2
    return max(mu[half:]) <= max(mu[:half])


# ---------------------------------------------------------------------------
# layer stabilisers


def verify_stabilizer_generators(B: GroupSpec, claimed: Sequence[Word], n: int, depth: int,
                                 point_cap: int = pg.POINT_CAP) -> bool:
    """Check in the level-``depth`` quotient that the claimed words normally generate St_B(n).

    Each claimed element must fix layer n, and the normal closure of the
    claimed elements in B must have the order of the layer-n stabiliser.
    """
    if depth <= n:
        raise InputError("depth must exceed n")
    Q = level_quotient(B, depth, point_cap)
    elems = [evaluate_word_perm(Q.perms, B, w) for w in claimed]
    if not all(pg.fixes_layer(e, B.m, depth, n) for e in elems):
        return False
    target = Q.group.stabilizer_order(n)
    closure = PermGroup(Q.perms, B.m, depth, normal_seeds=elems)
    return closure.order == target


def gen_basilica_stabilizer_words(d: int, m: int, s: int, n: int) -> list[list[tuple[str, int]]]:
    """Normal generators of St_B(n) for the generalised Basilica group.

    Write n = s q + r and q = d k + l.  The generator a_{i,j} enters with
    exponent m^(k+1) when i s + j <= l s + r - 1 and m^k otherwise.
    """
    from .zoo import gb_name

    if n < 0:
        raise InputError("n must be non-negative")
    q, r = divmod(n, s)
    k, l = divmod(q, d)
    out = []
    for i in range(d):
        for j in range(s):
            e = m ** (k + 1) if i * s + j <= l * s + r - 1 else m**k
            out.append([(gb_name(i, j), e)])
    return out


# ---------------------------------------------------------------------------
# supports


def support_witness(g: Automorphism, v: Vertex | str, depth: int,
                    point_cap: int = pg.POINT_CAP) -> bool:
    """Whether g fixes every vertex of length <= depth outside the subtree at v.

    It suffices to look at the leaves of X^depth: if all leaves outside the
    subtree are fixed, so are all shorter vertices outside it, and v itself.
    """
    v = vertex(v, g.m)
    if depth < len(v):
        raise InputError("depth must be at least |v|")
    _check_points(g.m, depth, point_cap)
    perm = level_perm(g, depth)
    width = g.m ** (depth - len(v))
    lo = sum(x * g.m ** (len(v) - 1 - t) for t, x in enumerate(v)) * width
    outside = np.ones(len(perm), dtype=bool)
    outside[lo:lo + width] = False
    return bool(np.array_equal(perm[outside], np.flatnonzero(outside)))


def dihedral_weakly_branch_witness(s: int = 2) -> tuple[Automorphism, list[Automorphism]]:
    """A commutator-word witness in bp_s of the infinite dihedral group.

    In D = <sigma, b = (b, sigma)> the word w = [[x0, x1], [x2, x3]] is a
    law (D is metabelian).  With c_0 = beta_0(sigma b sigma) and
    c_1 = c_2 = beta_1(sigma), c_3 = beta_1(sigma b) the value w(c) is a
    non-trivial element of bp_s(D) whose support lies below the vertex 0.
    Returns the value and the four arguments.
    """
    from .zoo import infinite_dihedral

    if s < 2:
        raise InputError("the witness needs s >= 2")
    D = infinite_dihedral()
    sig, b = D["sigma"], D["b"]
    c = [
        beta(compose(compose(sig, b), sig), s, 0),
        beta(sig, s, 1),
        beta(sig, s, 1),
        beta(compose(sig, b), s, 1),
    ]
    comm = lambda x, y: compose(compose(inverse(x), inverse(y)), compose(x, y))
    w = comm(comm(c[0], c[1]), comm(c[2], c[3]))
    return w, c
