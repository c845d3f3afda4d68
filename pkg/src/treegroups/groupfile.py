"""Plain-text group definitions in wreath-recursion notation.

A group file lists the alphabet size and one definition per line::

    # the Grigorchuk group
    alphabet 2
    gen a = (0 1)(e, e)
    gen b = (c, a)
    gen c = (d, a)
    gen d = (b, e)

Each definition is ``gen NAME = PERM? (EXPR, ..., EXPR)`` with exactly m
section expressions.  PERM is cycle notation such as ``(0 1 2)(3 4)`` and may
be omitted for a trivial root label.  An expression is ``e`` (the identity),
a name, ``NAME^k`` for a non-zero integer k, or a ``*``-separated product of
these, evaluated right to left as everywhere else in the library.  Names may
refer to each other recursively in any order.  ``state NAME = ...`` defines
an auxiliary state that can be referenced but is not a generator.  ``#``
starts a comment and ``;`` separates several statements on one line.

The machine is built with one state per freely reduced word in the defined
names.  A product in a section whose factors themselves have product sections
can generate ever longer words (and need not describe a finite-state element),
so words longer than FILE_WORD_CAP raise ResourceError.
"""

from __future__ import annotations

import re
from collections import deque
from typing import Iterable

from .errors import InputError, ParseError, ResourceError
from .tree_core import (
    Automorphism,
    GroupSpec,
    Machine,
    Perm,
    format_cycles,
    parse_cycles,
    perm_compose,
    perm_identity,
    perm_inverse,
    perm_is_identity,
)

FILE_STATE_CAP = 10**5
FILE_WORD_CAP = 64

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_NAME_RE = re.compile(_NAME)
_DEF_RE = re.compile(rf"^(gen|state)\s+({_NAME})\s*=\s*(.*)$")
_FACTOR_RE = re.compile(rf"^({_NAME})(?:\s*\^\s*(-?\d+))?$")

Word = tuple[tuple[str, int], ...]


def _reduce(word: Iterable[tuple[str, int]]) -> Word:
    out: list[tuple[str, int]] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def _parse_expr(text: str, line: int) -> Word:
    text = text.strip()
    if not text:
        raise ParseError("empty section expression", line)
    letters: list[tuple[str, int]] = []
    for factor in text.split("*"):
        factor = factor.strip()
        match = _FACTOR_RE.match(factor)
        if not match:
            raise ParseError(f"malformed expression {factor!r}", line)
        name, exp = match.group(1), match.group(2)
        e = int(exp) if exp is not None else 1
        if e == 0:
            raise ParseError(f"zero exponent in {factor!r}", line)
        if name == "e":
            if exp is not None:
                raise ParseError("the identity e takes no exponent", line)
            continue
        letters.extend([(name, 1 if e > 0 else -1)] * abs(e))
    return _reduce(letters)


def _split_groups(rhs: str, line: int) -> list[str]:
    """Split ``(..)(..)(..)`` into the bodies of its parenthesised groups."""
    groups = []
    pos = 0
    rhs = rhs.strip()
    while pos < len(rhs):
        if rhs[pos].isspace():
            pos += 1
            continue
        if rhs[pos] != "(":
            raise ParseError(f"expected '(' in {rhs!r}", line)
        end = rhs.find(")", pos)
        if end < 0:
            raise ParseError(f"unbalanced parentheses in {rhs!r}", line)
        groups.append(rhs[pos + 1:end])
        pos = end + 1
    return groups


def parse_group_file(text: str, state_cap: int = FILE_STATE_CAP) -> GroupSpec:
    """Parse a group file into a GroupSpec of canonical generators."""
    m = None
    defs: dict[str, tuple[Perm | None, list[Word], int]] = {}
    gens: list[str] = []
    pending_perms: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        content = raw.split("#", 1)[0]
        for stmt in content.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            if stmt.startswith("alphabet"):
                parts = stmt.split()
                if len(parts) != 2 or not parts[1].isdigit():
                    raise ParseError("expected 'alphabet M'", lineno)
                if m is not None:
                    raise ParseError("alphabet declared twice", lineno)
                if defs:
                    raise ParseError("alphabet must precede all definitions", lineno)
                m = int(parts[1])
                if m < 2:
                    raise ParseError("alphabet size must be at least 2", lineno)
                continue
            match = _DEF_RE.match(stmt)
            if not match:
                raise ParseError(f"cannot parse {stmt!r}", lineno)
            kind, name, rhs = match.groups()
            if name == "e":
                raise ParseError("'e' is reserved for the identity", lineno)
            if name in defs:
                raise ParseError(f"{name} defined twice", lineno)
            groups = _split_groups(rhs, lineno)
            if not groups:
                raise ParseError(f"{name}: missing sections", lineno)
            *cycles, secs = groups
            sec_list = secs.split(",")
            if m is None:
                m = len(sec_list)
            if len(sec_list) != m:
                raise ParseError(f"{name}: expected {m} sections, got {len(sec_list)}", lineno)
            words = [_parse_expr(s, lineno) for s in sec_list]
            perm_text = "".join(f"({c})" for c in cycles)
            defs[name] = (None, words, lineno)
            pending_perms.append((name, perm_text, lineno))
            if kind == "gen":
                gens.append(name)
    if m is None or not gens:
        raise ParseError("no generators defined")
    for name, perm_text, lineno in pending_perms:
        try:
            perm = parse_cycles(perm_text, m) if perm_text else perm_identity(m)
        except InputError as exc:
            raise ParseError(f"{name}: {exc}", lineno) from None
        defs[name] = (perm, defs[name][1], lineno)
    for name, (_, words, lineno) in defs.items():
        for w in words:
            for ref, _ in w:
                if ref not in defs:
                    raise ParseError(f"{name}: unknown name {ref!r}", lineno)
    return _solve(m, defs, gens, state_cap)


def _solve(m: int, defs, gens: list[str], state_cap: int) -> GroupSpec:
    """Build one machine whose states are reduced words in the defined names."""
    inv_perm = {n: perm_inverse(p) for n, (p, _, _) in defs.items()}

    def letter_perm(letter):
        name, e = letter
        return defs[name][0] if e == 1 else inv_perm[name]

    def letter_section(letter, x):
        name, e = letter
        if e == 1:
            return defs[name][1][x]
        # (g^-1)|_x = (g|_{g^-1(x)})^-1
        w = defs[name][1][inv_perm[name][x]]
        return tuple((n, -f) for n, f in reversed(w))

    index: dict[Word, int] = {}
    perms: list[Perm] = []
    nexts: list[list[int]] = []
    queue: deque[Word] = deque()

    def state(w: Word) -> int:
        if w not in index:
            if len(index) >= state_cap:
                raise ResourceError(f"group file needs more than {state_cap} states")
            if len(w) > FILE_WORD_CAP:
                raise ResourceError(f"section words grow beyond {FILE_WORD_CAP} letters")
            index[w] = len(perms)
            perms.append(())
            nexts.append([])
            queue.append(w)
        return index[w]

    ident = state(())
    starts = {n: state(((n, 1),)) for n in gens}
    while queue:
        w = queue.popleft()
        q = index[w]
        perm = perm_identity(m)
        for letter in reversed(w):
            perm = perm_compose(letter_perm(letter), perm)
        row = []
        for x in range(m):
            # (l_1 ... l_k)|_x = l_1|_{y_1} ... l_k|_{y_k}, y_k = x, y_i = l_{i+1}(y_{i+1})
            parts = []
            y = x
            for letter in reversed(w):
                parts.append(letter_section(letter, y))
                y = letter_perm(letter)[y]
            sec = _reduce(l for part in reversed(parts) for l in part)
            row.append(state(sec))
        perms[q] = perm
        nexts[q] = row
    mach = Machine(m, tuple(perms), tuple(tuple(r) for r in nexts), ident)
    return GroupSpec(m, tuple(gens), tuple(Automorphism(mach, starts[n]).canonical() for n in gens))


# ---------------------------------------------------------------------------
# emitting


def format_group_file(G: GroupSpec, comment: str | None = None) -> str:
    """A group file whose generators parse back to G (canonical equality)."""
    for name in G.names:
        if not _NAME_RE.fullmatch(name) or name == "e":
            raise InputError(f"generator name {name!r} cannot be written to a group file")
    names: dict[tuple, str] = {}
    states: list[Automorphism] = []
    for name, g in G.items():
        c = g.canonical()
        if c.key() not in names:
            names[c.key()] = name
    taken = set(G.names)
    counter = 0
    seen: set[tuple] = set()
    queue: deque[Automorphism] = deque(g.canonical() for g in G.generators)
    while queue:
        g = queue.popleft()
        if g.key() in seen or g.is_identity():
            continue
        seen.add(g.key())
        if g.key() not in names:
            counter += 1
            while f"s{counter}" in taken:
                counter += 1
            names[g.key()] = f"s{counter}"
            taken.add(f"s{counter}")
        states.append(g)
        for x in range(G.m):
            queue.append(g.section((x,)))

    def ref(h: Automorphism) -> str:
        return "e" if h.is_identity() else names[h.key()]

    def body(g: Automorphism) -> str:
        perm = g.root_perm
        head = "" if perm_is_identity(perm) else format_cycles(perm)
        return head + "(" + ", ".join(ref(g.section((x,))) for x in range(G.m)) + ")"

    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"alphabet {G.m}")
    for name, g in G.items():
        lines.append(f"gen {name} = {body(g.canonical())}")
    gen_keys = {g.canonical().key() for g in G.generators}
    for g in states:
        if g.key() not in gen_keys:
            lines.append(f"state {names[g.key()]} = {body(g)}")
    return "\n".join(lines) + "\n"


def parse_word(text: str, G: GroupSpec) -> list[tuple[str, int]]:
    """Parse ``a*b^-1*c^2`` (or ``e``) into a word over the generators of G."""
    word = _parse_expr(text, 0) if text.strip() != "e" else ()
    for name, _ in word:
        if name not in G.names:
            raise InputError(f"unknown generator {name!r}")
    return list(word)
