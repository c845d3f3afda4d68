"""An L-presentation of the generalised Basilica groups and its class-2 quotient.

Generators ``a_{i,j}`` (0 <= i < d, 0 <= j < s) are totally ordered by the
index ``i*s + j``, which is the order in which the substitution Phi walks
through them:

    Phi(a_{i,j})     = a_{i,j+1}     for j != s-1
    Phi(a_{i,s-1})   = a_{i+1,0}     for i != d-1
    Phi(a_{d-1,s-1}) = a_{0,0}^m

Relators are the commutators Q = {[a_{i,j}, a_{i',j}]} and the family

    R = {[a_{i,j}, a_{i',j'}^alpha(v,k)] : j, j' >= 1, 1 <= k <= m-1, v in Z^d}
    alpha(v,k) = a_{0,0}^(m v_0 + k) a_{1,0}^(v_1) ... a_{d-1,0}^(v_{d-1})

closed under Phi.  Conventions: [x, y] = x^-1 y^-1 x y and x^y = y^-1 x y.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import Inconclusive, InputError, ParseError
from .tree_core import GroupSpec

Letter = tuple[int, int, int]  # (i, j, +-1)


# ---------------------------------------------------------------------------
# free words


@dataclass(frozen=True)
class FreeWord:
    """A word over a_{i,j}^(+-1); products and powers are freely reduced."""

    letters: tuple[Letter, ...] = ()

    @staticmethod
    def gen(i: int, j: int, e: int = 1) -> "FreeWord":
        if e >= 0:
            return FreeWord(((i, j, 1),) * e)
        return FreeWord(((i, j, -1),) * -e)

    def reduced(self) -> "FreeWord":
        out: list[Letter] = []
        for x in self.letters:
            if out and out[-1][:2] == x[:2] and out[-1][2] == -x[2]:
                out.pop()
            else:
                out.append(x)
        return FreeWord(tuple(out))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters).reduced()

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((i, j, -e) for i, j, e in reversed(self.letters)))

    def __pow__(self, e: int) -> "FreeWord":
        base = self if e >= 0 else self.inverse()
        return FreeWord(base.letters * abs(e)).reduced()

    def conj(self, y: "FreeWord") -> "FreeWord":
        """x^y = y^-1 x y."""
        return y.inverse() * self * y

    def __len__(self):
        return len(self.letters)

    def exponent_sums(self, d: int, s: int) -> list[int]:
        sums = [0] * (d * s)
        for i, j, e in self.letters:
            sums[i * s + j] += e
        return sums

    def to_text(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"a[{i},{j}]^{e}" for i, j, e in self.letters)

    def to_group_word(self) -> list[tuple[str, int]]:
        from .zoo import gb_name

        return [(gb_name(i, j), e) for i, j, e in self.letters]

    @staticmethod
    def parse(text: str) -> "FreeWord":
        text = text.strip()
        if text in ("", "1"):
            return FreeWord()
        letters = []
        for tok in text.split():
            try:
                head, exp = tok.split("^")
                if not (head.startswith("a[") and head.endswith("]")):
                    raise ValueError
                i, j = (int(x) for x in head[2:-1].split(","))
                e = int(exp)
            except ValueError:
                raise InputError(f"malformed letter {tok!r}") from None
            if e not in (1, -1) or i < 0 or j < 0:
                raise InputError(f"malformed letter {tok!r}")
            letters.append((i, j, e))
        return FreeWord(tuple(letters))


def comm(x: FreeWord, y: FreeWord) -> FreeWord:
    """[x, y] = x^-1 y^-1 x y."""
    return x.inverse() * y.inverse() * x * y


# ---------------------------------------------------------------------------
# the presentation


@dataclass(frozen=True)
class LPresentation:
    d: int
    m: int
    s: int

    def __post_init__(self):
        if self.d < 1 or self.m < 2 or self.s < 1:
            raise InputError("need d >= 1, m >= 2, s >= 1")

    @property
    def rank(self) -> int:
        return self.d * self.s

    def index(self, i: int, j: int) -> int:
        return i * self.s + j

    def Q(self) -> list[FreeWord]:
        """[a_{i,j}, a_{i',j}] for i < i' (the others are trivial or inverses)."""
        out = []
        for j in range(self.s):
            for i, i2 in itertools.combinations(range(self.d), 2):
                out.append(comm(FreeWord.gen(i, j), FreeWord.gen(i2, j)))
        return out

    def alpha(self, v: Sequence[int], k: int) -> FreeWord:
        return alpha(v, k, self.m)

    def R(self, v_box: int) -> list[FreeWord]:
        """Members of R with v in [-v_box, v_box]^d."""
        out = []
        boxes = itertools.product(range(-v_box, v_box + 1), repeat=self.d)
        for v in boxes:
            for k in range(1, self.m):
                a = self.alpha(v, k)
                for i, i2 in itertools.product(range(self.d), repeat=2):
                    for j, j2 in itertools.product(range(1, self.s), repeat=2):
                        out.append(comm(FreeWord.gen(i, j), FreeWord.gen(i2, j2).conj(a)))
        return out

    def phi(self, w: FreeWord) -> FreeWord:
        return apply_phi(w, self.d, self.m, self.s)

    def theta(self, i_prime: int, w: FreeWord) -> FreeWord:
        return apply_theta(i_prime, w, self.d, self.m, self.s)


def alpha(v: Sequence[int], k: int, m: int) -> FreeWord:
    """a_{0,0}^(m v_0 + k) a_{1,0}^(v_1) ... a_{d-1,0}^(v_{d-1})."""
    if not 0 <= k < m:
        raise InputError("k must lie in 0..m-1")
    if not v:
        raise InputError("v must have d >= 1 entries")
    w = FreeWord.gen(0, 0, m * v[0] + k)
    for i in range(1, len(v)):
        w = w * FreeWord.gen(i, 0, v[i])
    return w


def alpha_carry(v: Sequence[int], k: int, m: int) -> tuple[tuple[int, ...], int]:
    """(v', k') with alpha(v, k) a_{0,0} = alpha(v', k') in the free abelian image.

    Multiplying by a_{0,0} raises k by one, carrying into v_0 at k = m - 1.
    """
    if k + 1 < m:
        return tuple(v), k + 1
    return (v[0] + 1,) + tuple(v[1:]), 0


def apply_phi(w: FreeWord, d: int, m: int, s: int) -> FreeWord:
    out = FreeWord()
    for i, j, e in w.letters:
        if j != s - 1:
            img = FreeWord.gen(i, j + 1)
        elif i != d - 1:
            img = FreeWord.gen(i + 1, 0)
        else:
            img = FreeWord.gen(0, 0, m)
        out = out * (img if e == 1 else img.inverse())
    return out


def apply_theta(i_prime: int, w: FreeWord, d: int, m: int, s: int) -> FreeWord:
    """a_{i,j} -> a_{i,j} a_{i,j}^c for j != 0, with c = a_{i',0} (i' != 0) or a_{0,0}^m."""
    if not 0 <= i_prime < d:
        raise InputError(f"i' must lie in 0..{d - 1}")
    c = FreeWord.gen(i_prime, 0) if i_prime != 0 else FreeWord.gen(0, 0, m)
    out = FreeWord()
    for i, j, e in w.letters:
        if j == 0:
            img = FreeWord.gen(i, 0)
        else:
            x = FreeWord.gen(i, j)
            img = x * x.conj(c)
        out = out * (img if e == 1 else img.inverse())
    return out


def relators(P: LPresentation, r_max: int, v_box: int) -> list[FreeWord]:
    """Q together with Phi^r(R) for 0 <= r <= r_max and v in the box, deduplicated."""
    out: dict[FreeWord, None] = {}
    for q in P.Q():
        out.setdefault(q.reduced(), None)
    layer = P.R(v_box)
    for r in range(r_max + 1):
        for w in layer:
            out.setdefault(w.reduced(), None)
        if r < r_max:
            layer = [P.phi(w) for w in layer]
    return [w for w in out if w.letters]


def relators_by_depth(P: LPresentation, r_max: int, v_box: int) -> list[list[FreeWord]]:
    """Phi^r(R) for r = 0..r_max, one list per r."""
    layer = P.R(v_box)
    out = [layer]
    for _ in range(r_max):
        layer = [P.phi(w) for w in layer]
        out.append(layer)
    return out


def verify_relators(B: GroupSpec, rel: Iterable[FreeWord]) -> bool:
    """Whether every relator evaluates to the identity in B."""
    from .groups import word_is_identity

    return all(word_is_identity(B, w.to_group_word()) for w in rel)


def failing_relators(B: GroupSpec, rel: Iterable[FreeWord]) -> list[FreeWord]:
    from .groups import word_is_identity

    return [w for w in rel if not word_is_identity(B, w.to_group_word())]


def abelianization_check(P: LPresentation, r_max: int, v_box: int,
                         extra: Iterable[FreeWord] = ()) -> bool:
    """Whether every relator has exponent sum zero in every generator."""
    words = relators(P, r_max, v_box) + list(extra)
    return all(not any(w.exponent_sums(P.d, P.s)) for w in words)


# ---------------------------------------------------------------------------
# free class-2 nilpotent group


def pair_index(n: int) -> dict[tuple[int, int], int]:
    """Coordinates of the basic commutators [y_a, y_b], a < b."""
    return {pair: t for t, pair in enumerate(itertools.combinations(range(n), 2))}


@dataclass(frozen=True)
class Class2Element:
    """``y_0^e_0 ... y_{n-1}^e_{n-1} * prod_{a<b} [y_a, y_b]^c_ab`` in the free class-2 group."""

    exps: tuple[int, ...]
    comms: tuple[int, ...]

    @staticmethod
    def identity(n: int) -> "Class2Element":
        return Class2Element((0,) * n, (0,) * (n * (n - 1) // 2))

    @staticmethod
    def generator(n: int, a: int, e: int = 1) -> "Class2Element":
        exps = [0] * n
        exps[a] = e
        return Class2Element(tuple(exps), (0,) * (n * (n - 1) // 2))

    def __mul__(self, other: "Class2Element") -> "Class2Element":
        n = len(self.exps)
        e = np.array(self.exps, dtype=object)
        f = np.array(other.exps, dtype=object)
        c = [x + y for x, y in zip(self.comms, other.comms)]
        # moving y_a^f_a left past y_b^e_b (a < b) produces [y_a, y_b]^(-e_b f_a)
        for t, (a, b) in enumerate(itertools.combinations(range(n), 2)):
            c[t] -= e[b] * f[a]
        return Class2Element(tuple(int(x) for x in e + f), tuple(int(x) for x in c))


def collect(w: FreeWord, d: int, s: int) -> Class2Element:
    """Image of a free word in the free class-2 nilpotent group on d*s generators."""
    n = d * s
    out = Class2Element.identity(n)
    for i, j, e in w.letters:
        out = out * Class2Element.generator(n, i * s + j, e)
    return out


# ---------------------------------------------------------------------------
# integer lattices


class IntLattice:
    """A sublattice of Z^n kept as integer rows in echelon form."""

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[list[int]]:
        return [self.rows[c] for c in sorted(self.rows)]

    @staticmethod
    def _lead(v: list[int]) -> int | None:
        for c, x in enumerate(v):
            if x:
                return c
        return None

    def add(self, v: Sequence[int]) -> bool:
        """Insert v; return whether the lattice grew."""
        v = [int(x) for x in v]
        if self.contains(v):
            return False
        while True:
            c = self._lead(v)
            if c is None:
                return True
            row = self.rows.get(c)
            if row is None:
                if v[c] < 0:
                    v = [-x for x in v]
                self.rows[c] = v
                return True
            g, x, y = _xgcd(row[c], v[c])
            new_row = [x * r + y * t for r, t in zip(row, v)]
            v = [(row[c] // g) * t - (v[c] // g) * r for r, t in zip(row, v)]
            if new_row[c] < 0:
                new_row = [-t for t in new_row]
            self.rows[c] = new_row

    def contains(self, v: Sequence[int]) -> bool:
        v = [int(x) for x in v]
        for c in sorted(self.rows):
            if v[c] == 0:
                continue
            row = self.rows[c]
            if v[c] % row[c]:
                return False
            q = v[c] // row[c]
            v = [t - q * r for t, r in zip(v, row)]
        return not any(v)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def abelian_invariants(rows: Sequence[Sequence[int]], n: int) -> tuple[list[int], int]:
    """Torsion invariants (> 1, dividing chain) and free rank of Z^n / <rows>."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form

    lat = IntLattice(n)
    for r in rows:
        lat.add(r)
    basis = lat.basis()
    if not basis:
        return [], n
    snf = smith_normal_form(Matrix(basis), domain=ZZ)
    diag = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    nonzero = [x for x in diag if x]
    return sorted(x for x in nonzero if x > 1), n - len(nonzero)


# ---------------------------------------------------------------------------
# gamma_2 / gamma_3


@dataclass(frozen=True)
class Class2Quotient:
    """gamma_2/gamma_3 of the presented group as Z^free_rank x prod C_t."""

    torsion: tuple[int, ...]
    free_rank: int
    relator_count: int

    @property
    def torsion_order(self) -> int:
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def to_json(self) -> str:
        return json.dumps({"torsion": list(self.torsion), "free_rank": self.free_rank,
                           "relators": self.relator_count}, sort_keys=True)


def relator_comm_vectors(P: LPresentation, words: Iterable[FreeWord]) -> list[tuple[int, ...]]:
    out = []
    for w in words:
        c = collect(w, P.d, P.s)
        if any(c.exps):
            raise InputError(f"relator {w.to_text()} is not in the commutator subgroup")
        out.append(c.comms)
    return out


def class2_quotient(P: LPresentation, r_max: int, v_box: int, check_stable: bool = True) -> Class2Quotient:
    """Invariants of gamma_2/gamma_3 for the presented group, truncated at (r_max, v_box).

    Raises Inconclusive when ``check_stable`` is set and the Phi-images have
    not stabilised within r_max.
    """
    if check_stable and not phi_stabilization(P, r_max, v_box):
        raise Inconclusive(f"Phi-images still grow the relation lattice at r_max = {r_max}")
    words = relators(P, r_max, v_box)
    vecs = relator_comm_vectors(P, words)
    n = P.rank * (P.rank - 1) // 2
    torsion, free = abelian_invariants(sorted(set(vecs)), n)
    return Class2Quotient(tuple(torsion), free, len(words))


def phi_stabilization(P: LPresentation, r_max: int, v_box: int = 1, window: int = 2) -> bool:
    """Whether the last ``window`` layers Phi^r(R), r <= r_max, add nothing in class 2.

    Each checked layer r is compared with the lattice spanned by Q and all
    layers Phi^(<r)(R).  With r_max = 0 only R itself is compared with Q.
    """
    n = P.rank * (P.rank - 1) // 2
    lat = IntLattice(n)
    for v in relator_comm_vectors(P, P.Q()):
        lat.add(v)
    first = max(0, r_max - window + 1)
    for r, layer in enumerate(relators_by_depth(P, r_max, v_box)):
        for v in relator_comm_vectors(P, layer):
            if lat.add(v) and r >= first:
                return False
    return True


def stabilization_depth(P: LPresentation, r_limit: int, v_box: int = 1) -> int | None:
    """Smallest r such that Phi^r(R) adds nothing to the lattice of Q and Phi^(<r)(R)."""
    n = P.rank * (P.rank - 1) // 2
    lat = IntLattice(n)
    for v in relator_comm_vectors(P, P.Q()):
        lat.add(v)
    for r, layer in enumerate(relators_by_depth(P, r_limit, v_box)):
        grew = False
        for v in relator_comm_vectors(P, layer):
            grew |= lat.add(v)
        if not grew:
            return r
    return None


# ---------------------------------------------------------------------------
# text format


def format_relators(words: Iterable[FreeWord]) -> str:
    return "\n".join(w.to_text() for w in words) + "\n"


def parse_relators(text: str) -> list[FreeWord]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(FreeWord.parse(line))
        except InputError as exc:
            raise ParseError(str(exc), lineno) from None
    return out

