"""Permutation groups acting on a layer X^n of the tree.

Points of X^n are words numbered lexicographically (first letter most
significant).  Permutations are numpy integer arrays ``g`` with ``g[i]`` the
image of point ``i``; the product ``g * h`` (h first) is ``g[h]``.

Two engines compute orders, memberships and layer stabilisers:

* ``SchreierSims`` is a deterministic Schreier-Sims over an arbitrary group.
  Its base starts with one leaf below every vertex of layers 1, 2, ... so
  that the layer stabilisers St(k) appear as members of the stabiliser chain.

* ``LayeredPGroup`` handles groups whose labels are all rotations
  ``x -> x + e`` on a prime alphabet.  Then every quotient St(k)/St(k+1) is
  an elementary abelian p-group, embedded in F_p^(p^k) by reading off label
  exponents at layer k, and the group is built one layer at a time by linear
  algebra over F_p.  This scales to the 10^3 .. 10^4 point range.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError

#: Default bound on the number of points m^n of a layer.
POINT_CAP = 3 * 10**4

DTYPE = np.int32


def identity_perm(n: int) -> np.ndarray:
    return np.arange(n, dtype=DTYPE)


def inverse_perm(g: np.ndarray) -> np.ndarray:
    inv = np.empty_like(g)
    inv[g] = np.arange(len(g), dtype=g.dtype)
    return inv


def mul(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """``g * h`` with h acting first."""
    return g[h]


def perm_power_array(g: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        g, e = inverse_perm(g), -e
    out = identity_perm(len(g))
    base = g
    while e:
        if e & 1:
            out = base[out]
        e >>= 1
        if e:
            base = base[base]
    return out


def is_identity_perm(g: np.ndarray) -> bool:
    return bool(np.array_equal(g, np.arange(len(g))))


def layer_offsets(m: int, n: int) -> list[int]:
    """Offsets of layers 1..n inside the disjoint union of those layers.

    ``layer_offsets(m, n)[k]`` is ``m + m^2 + ... + m^k``, so the vertices of
    layers 1..k occupy the first ``layer_offsets(m, n)[k]`` points.
    """
    out = [0]
    for k in range(1, n + 1):
        out.append(out[-1] + m**k)
    return out


def to_layer_union(g: np.ndarray, m: int, n: int) -> np.ndarray:
    """Action on the vertices of layers 1..n of a permutation of X^n.

    On this domain the subgroup fixing layers 1..k is the pointwise
    stabiliser of an initial segment of the points.
    """
    offs = layer_offsets(m, n)
    parts = [restrict_to_layer(g, m, n, k) + offs[k - 1] for k in range(1, n + 1)]
    if not parts:
        return np.zeros(0, dtype=DTYPE)
    return np.concatenate(parts).astype(DTYPE)


def from_layer_union(g: np.ndarray, m: int, n: int) -> np.ndarray:
    if n == 0:
        return identity_perm(1)
    off = layer_offsets(m, n)[n - 1]
    return (g[off:] - off).astype(DTYPE)


def restrict_to_layer(g: np.ndarray, m: int, n: int, k: int) -> np.ndarray:
    """Action on X^k of a permutation of X^n."""
    step = m ** (n - k)
    return (g[np.arange(m**k) * step] // step).astype(DTYPE)


def fixes_layer(g: np.ndarray, m: int, n: int, k: int) -> bool:
    return bool(np.array_equal(restrict_to_layer(g, m, n, k), np.arange(m**k)))


def restrict_to_subtree(g: np.ndarray, m: int, n: int, x: int) -> np.ndarray:
    """Section at the first-layer vertex x (which g must fix), on X^(n-1)."""
    step = m ** (n - 1)
    block = g[x * step:(x + 1) * step]
    if np.any(block // step != x):
        raise InputError("permutation does not fix the vertex")
    return (block - x * step).astype(DTYPE)


# ---------------------------------------------------------------------------
# Schreier-Sims


class SchreierSims:
    """Deterministic Schreier-Sims with a prescribed base prefix.

    Transversals are stored explicitly: ``transversals[i][x]`` maps
    ``base[i]`` to ``x``.  The base is extended, when needed, by the first
    moved point in the order ``base_prefix`` followed by 0, 1, 2, ...
    """

    def __init__(self, generators: Sequence[np.ndarray], degree: int,
                 base_prefix: Sequence[int] = ()):
        self.degree = degree
        self.ident = identity_perm(degree)
        gens = [np.asarray(g, dtype=DTYPE) for g in generators]
        gens = [g for g in gens if not is_identity_perm(g)]
        self.generators = gens
        self.base: list[int] = list(dict.fromkeys(int(b) for b in base_prefix))
        self._point_order = self.base + [x for x in range(degree) if x not in set(self.base)]
        if self.base:
            fixed = np.asarray(self.base)
            for g in gens:
                if np.array_equal(g[fixed], fixed):
                    self.base.append(self._first_moved(g))
                    fixed = np.asarray(self.base)
        else:
            for g in gens:
                if all(g[b] == b for b in self.base):
                    self.base.append(self._first_moved(g))
        self.strong: list[list[np.ndarray]] = []
        self.transversals: list[dict[int, np.ndarray]] = []
        current = gens
        for i, b in enumerate(self.base):
            self.strong.append(current)
            self.transversals.append(self._orbit(i))
            current = [g for g in current if g[b] == b]
        self._build()

    def _first_moved(self, g: np.ndarray) -> int:
        for x in self._point_order:
            if g[x] != x:
                return x
        raise AssertionError("identity has no moved point")

    def _orbit(self, i: int) -> dict[int, np.ndarray]:
        b = self.base[i]
        trans = {b: self.ident}
        queue = [b]
        for x in queue:
            u = trans[x]
            for g in self.strong[i]:
                y = int(g[x])
                if y not in trans:
                    trans[y] = g[u]
                    queue.append(y)
        return trans

    def strip(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        """Sift g from level ``start``; returns the residue and the level reached."""
        for i in range(start, len(self.base)):
            x = int(g[self.base[i]])
            u = self.transversals[i].get(x)
            if u is None:
                return g, i
            g = inverse_perm(u)[g]
        return g, len(self.base)

    def _build(self):
        i = len(self.base) - 1
        while i >= 0:
            restart = None
            trans = self.transversals[i]
            for x in list(trans):
                ux = trans[x]
                for s in self.strong[i]:
                    y = int(s[x])
                    schreier = inverse_perm(trans[y])[s[ux]]
                    if is_identity_perm(schreier):
                        continue
                    h, j = self.strip(schreier, i + 1)
                    if is_identity_perm(h):
                        continue
                    if j == len(self.base):
                        self.base.append(self._first_moved(h))
                        self.strong.append([])
                        self.transversals.append({})
                    for level in range(i + 1, j + 1):
                        self.strong[level].append(h)
                        self.transversals[level] = self._orbit(level)
                    restart = j
                    break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1

    @property
    def orbit_lengths(self) -> list[int]:
        return [len(t) for t in self.transversals]

    @property
    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def contains(self, g: np.ndarray) -> bool:
        h, j = self.strip(np.asarray(g, dtype=DTYPE))
        return j == len(self.base) and is_identity_perm(h)

    def stabilizer_order(self, prefix: int) -> int:
        """Order of the pointwise stabiliser of ``base[:prefix]``."""
        out = 1
        for t in self.transversals[prefix:]:
            out *= len(t)
        return out

    def stabilizer_generators(self, prefix: int) -> list[np.ndarray]:
        if prefix >= len(self.base):
            return []
        return list(self.strong[prefix])


def normal_closure_schreier_sims(ambient: Sequence[np.ndarray], elements: Sequence[np.ndarray],
                                 degree: int, base_prefix: Sequence[int] = ()) -> SchreierSims:
    """Normal closure of ``elements`` under conjugation by ``ambient``."""
    gens = [np.asarray(e, dtype=DTYPE) for e in elements if not is_identity_perm(e)]
    chain = SchreierSims(gens, degree, base_prefix)
    queue = list(gens)
    inv_amb = [inverse_perm(s) for s in ambient]
    while queue:
        e = queue.pop()
        for s, si in zip(ambient, inv_amb):
            c = si[e[s]]
            if not chain.contains(c):
                gens.append(c)
                queue.append(c)
                chain = SchreierSims(gens, degree, base_prefix)
    return chain


# ---------------------------------------------------------------------------
# linear algebra over F_p


def _mm(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Matrix product mod p, exact while entries stay below 2^53."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    out = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
    return np.rint(np.mod(out, p)).astype(np.int64) % p


class FpSpan:
    """A subspace of F_p^n kept in reduced row echelon form.

    When ``track`` is set the rows are also expressed as combinations of the
    inserted vectors (``U``), so coordinates with respect to the inserted
    vectors can be recovered.
    """

    def __init__(self, p: int, n: int, track: bool = False, chunk: int = 64):
        self.p = p
        self.n = n
        self.track = track
        self.chunk = chunk
        self.rows = np.zeros((0, n), dtype=np.int64)
        self.pivots: list[int] = []
        self.U = np.zeros((0, 0), dtype=np.int64)
        self.count = 0

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, V: np.ndarray) -> np.ndarray:
        V = np.asarray(V, dtype=np.int64) % self.p
        if not self.pivots:
            return V
        return (V - _mm(V[:, self.pivots], self.rows, self.p)) % self.p

    def contains(self, V: np.ndarray) -> np.ndarray:
        return ~np.any(self.reduce(np.atleast_2d(V)), axis=1)

    def coords(self, V: np.ndarray) -> np.ndarray:
        """Coordinates of vectors in the span w.r.t. the inserted vectors."""
        if not self.track:
            raise RuntimeError("coordinates need track=True")
        V = np.atleast_2d(np.asarray(V, dtype=np.int64) % self.p)
        if not self.pivots:
            return np.zeros((V.shape[0], 0), dtype=np.int64)
        return _mm(V[:, self.pivots], self.U, self.p)

    def add(self, V: np.ndarray) -> list[int]:
        """Insert vectors; return indices of those independent of their predecessors."""
        V = np.atleast_2d(np.asarray(V, dtype=np.int64) % self.p)
        chosen: list[int] = []
        for start in range(0, V.shape[0], self.chunk):
            chosen.extend(start + i for i in self._add_chunk(V[start:start + self.chunk]))
        return chosen

    def _add_chunk(self, C: np.ndarray) -> list[int]:
        p = self.p
        b = C.shape[0]
        if not self.pivots:
            K = np.zeros((b, 0), dtype=np.int64)
            W = C.copy()
        else:
            K = C[:, self.pivots]
            W = (C - _mm(K, self.rows, p)) % p
        T = np.eye(b, dtype=np.int64)
        sel: list[int] = []
        piv: list[int] = []
        for i in range(b):
            nz = np.flatnonzero(W[i])
            if nz.size == 0:
                continue
            c = int(nz[0])
            inv = pow(int(W[i, c]), -1, p)
            W[i] = (W[i] * inv) % p
            T[i] = (T[i] * inv) % p
            f = W[:, c].copy()
            f[i] = 0
            if np.any(f):
                W = (W - np.outer(f, W[i])) % p
                T = (T - np.outer(f, T[i])) % p
            sel.append(i)
            piv.append(c)
        if not sel:
            return []
        new_rows = W[sel]
        r_old = len(self.pivots)
        if self.track:
            Tsel = T[sel][:, sel]
            old_part = (-_mm(_mm(T[sel], K, p), self.U, p)) % p if r_old else np.zeros((len(sel), 0), dtype=np.int64)
            U_new = np.concatenate([old_part, Tsel], axis=1) % p
            U_old = np.concatenate([self.U, np.zeros((r_old, len(sel)), dtype=np.int64)], axis=1)
        if r_old:
            F = self.rows[:, piv]
            if np.any(F):
                self.rows = (self.rows - _mm(F, new_rows, p)) % p
                if self.track:
                    U_old = (U_old - _mm(F, U_new, p)) % p
        self.rows = np.concatenate([self.rows, new_rows], axis=0)
        self.pivots.extend(piv)
        if self.track:
            self.U = np.concatenate([U_old, U_new], axis=0)
        self.count += len(sel)
        return sel


def fp_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    if rows.size == 0:
        return 0
    span = FpSpan(p, rows.shape[1])
    span.add(rows)
    return span.dim


# ---------------------------------------------------------------------------
# layered engine for rotation-labelled p-groups


class LayeredPGroup:
    """Normal closure, inside ``<ambient>``, of ``seeds`` acting on X^n.

    Requires a prime alphabet size p and rotation labels everywhere.  For
    ``seeds = ambient`` this is the group generated by the ambient set.

    Layer k is processed with these invariants: ``R`` holds elements of
    St(k) whose normal closure N_k equals the intersection of the group with
    St(k).  The image V_k of N_k in F_p^(p^k) is the span of the ambient
    translates of the label vectors of R.  Elements ``E_k`` realising a basis
    of V_k are conjugates of members of R; N_{k+1} is then the normal
    closure of

    * the residues of R and of all ``e^s`` (e in E_k, s ambient) after
      dividing out the matching product of E_k,
    * the p-th powers of the seeds of E_k (members of R), and
    * the commutators of those seeds with every element of E_k.

    These relations make <E_k> N_{k+1} / N_{k+1} normal, central-by-seeds
    hence abelian, and of exponent p, so its order is p^(dim V_k).
    """

    def __init__(self, ambient: Sequence[np.ndarray], seeds: Sequence[np.ndarray], p: int, n: int):
        self.p = p
        self.n = n
        self.degree = p**n
        self.ambient = [np.asarray(s, dtype=DTYPE) for s in ambient]
        self.ambient_inv = [inverse_perm(s) for s in self.ambient]
        self.basis: list[list[np.ndarray]] = []
        self.spans: list[FpSpan] = []
        self.dims: list[int] = []
        R = [np.asarray(g, dtype=DTYPE) for g in seeds]
        R = [g for g in R if not is_identity_perm(g)]
        for k in range(n):
            self._layer(k, R)
            if k + 1 < n:
                R = self._next_relators(k, R)
            else:
                R = []

    # label exponents at layer k of elements of St(k)
    def _vectors(self, k: int, X: np.ndarray) -> np.ndarray:
        p, n = self.p, self.n
        idx = np.arange(p**k) * p ** (n - k)
        X = np.atleast_2d(X)
        return (X[:, idx] // p ** (n - k - 1)) % p

    def _layer_action(self, k: int) -> list[np.ndarray]:
        return [restrict_to_layer(s, self.p, self.n, k) for s in self.ambient]

    def _layer(self, k: int, R: list[np.ndarray]):
        p = self.p
        last = k == self.n - 1
        span = FpSpan(p, p**k, track=not last)
        elems: list[np.ndarray] = []
        vecs: list[np.ndarray] = []
        seed_flags: list[bool] = []
        actions = self._layer_action(k)

        def spin(frontier):
            while frontier:
                cand = []
                origin = []
                for e in frontier:
                    for si, act in enumerate(actions):
                        cand.append(vecs[e][act])
                        origin.append((e, si))
                new = span.add(np.stack(cand))
                frontier = []
                for c in new:
                    e, si = origin[c]
                    s, sinv = self.ambient[si], self.ambient_inv[si]
                    elems.append(sinv[elems[e][s]])
                    vecs.append(cand[c])
                    seed_flags.append(False)
                    frontier.append(len(elems) - 1)

        # seeds are added one at a time and spun to a submodule before the
        # next one is examined, so only module generators become seeds
        if R:
            VR = self._vectors(k, np.stack(R))
            pending = np.arange(len(R))
            while pending.size:
                red = span.reduce(VR[pending])
                nz = np.flatnonzero(red.any(axis=1))
                if nz.size == 0:
                    break
                i = int(pending[nz[0]])
                pending = pending[nz[1:]]
                span.add(VR[i])
                elems.append(R[i])
                vecs.append(VR[i])
                seed_flags.append(True)
                spin([len(elems) - 1])
        self.basis.append(elems)
        self.spans.append(span)
        self.dims.append(len(elems))
        self._seed_flags = seed_flags
        self._vecs = vecs

    def _divide_out(self, k: int, X: np.ndarray) -> np.ndarray:
        """Multiply rows of X by inverse products of E_k cancelling their vectors."""
        if X.shape[0] == 0 or not self.basis[k]:
            return X
        p = self.p
        C = self.spans[k].coords(self._vectors(k, X))
        X = X.copy()
        E = self.basis[k]
        for i in range(len(E)):
            col = C[:, i]
            if not col.any():
                continue
            inv = inverse_perm(E[i])
            f = inv
            for c in range(1, p):
                mask = col == c
                if mask.any():
                    X[mask] = f[X[mask]]
                f = inv[f]
        return X

    def _next_relators(self, k: int, R: list[np.ndarray]) -> list[np.ndarray]:
        p = self.p
        E = self.basis[k]
        out: list[np.ndarray] = []
        if R:
            out.append(self._divide_out(k, np.stack(R)))
        if E:
            Earr = np.stack(E)
            for s, sinv in zip(self.ambient, self.ambient_inv):
                conj = sinv[Earr[:, s]]
                out.append(self._divide_out(k, conj))
            Einv = np.empty_like(Earr)
            rows = np.arange(Earr.shape[0])[:, None]
            Einv[rows, Earr] = np.arange(Earr.shape[1], dtype=DTYPE)[None, :]
            for t, seed in zip(E, self._seed_flags):
                if not seed:
                    continue
                out.append(perm_power_array(t, p)[None, :])
                tinv = inverse_perm(t)
                # [t, e] = t^-1 e^-1 t e
                inner = t[Earr]
                comm = tinv[np.take_along_axis(Einv, inner, axis=1)]
                out.append(comm)
        if not out:
            return []
        allX = np.concatenate(out, axis=0)
        keep = ~np.all(allX == np.arange(allX.shape[1], dtype=DTYPE)[None, :], axis=1)
        allX = allX[keep]
        if allX.shape[0] == 0:
            return []
        allX = np.unique(allX, axis=0)
        return list(allX)

    # -- queries -----------------------------------------------------------------

    @property
    def layer_orders(self) -> list[int]:
        return [self.p**d for d in self.dims]

    @property
    def order(self) -> int:
        return self.p ** sum(self.dims)

    def contains(self, g: np.ndarray) -> bool:
        g = np.asarray(g, dtype=DTYPE)[None, :]
        p, n = self.p, self.n
        for k in range(n):
            if not fixes_layer(g[0], p, n, k):
                return False
            vec = self._vectors(k, g)
            if not self.spans[k].contains(vec)[0]:
                return False
            if self.spans[k].track:
                g = self._divide_out(k, g)
            else:
                # final layer: membership of the vector decides, provided the
                # labels below are rotations, i.e. g fixes nothing else
                return self._rotation_labels(k, g[0])
        return is_identity_perm(g[0])

    def _rotation_labels(self, k: int, g: np.ndarray) -> bool:
        p, n = self.p, self.n
        step = p ** (n - k - 1)
        words = np.arange(p ** (k + 1)) * step
        img = g[words] // step
        base = (np.arange(p**k) * p)
        e = img[base] - base
        for x in range(p):
            if not np.array_equal(img[base + x], base + (x + e) % p):
                return False
        return k == n - 1

    def stabilizer_generators(self, k: int) -> list[np.ndarray]:
        out = []
        for j in range(k, self.n):
            out.extend(self.basis[j])
        return out


def rotation_labelled(perms: Iterable[np.ndarray], p: int, n: int) -> bool:
    """Whether every label of every permutation of X^n is a rotation mod p."""
    for g in perms:
        g = np.asarray(g)
        for k in range(n):
            step = p ** (n - k - 1)
            words = np.arange(p ** (k + 1)) * step
            img = g[words] // step  # images of u x 0.. truncated to layer k+1
            base = img[::p] - img[::p] % p  # image of u, shifted
            e = img[::p] % p
            for x in range(p):
                if not np.array_equal(img[x::p], base + (x + e) % p):
                    return False
    return True


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))
