"""Congruence-quotient orders, series of obstructions and Hausdorff dimension.

For a group G acting on the m-adic tree write ``log(n) = log_m |G/St_G(n)|``
and ``L(n) = log(n+1) - log(n) = log_m |St_G(n)/St_G(n+1)|``.  The series of
obstructions measures how far each layer falls short of m copies of the
previous one::

    o(0) = -L(0),    o(n) = m L(n-1) - L(n)   (n >= 1).

For a group that is transitive on the first layer and has cyclic labels,
L(0) = 1 and o(0) = -1.  The series determines the log-orders back via
``L(n) = m L(n-1) - o(n)``.

The partial dimension estimate at truncation N is::

    1 - sum_{i=1..N} (m^-i - m^-(N+1)) o(i)
      = (m-1) log(N+1) / m^(N+1) + m^-(N+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError
from .groups import exact_log, level_quotient
from .permgroups import POINT_CAP, fp_rank
from .tree_core import GroupSpec


@dataclass(frozen=True)
class ObstructionSeries:
    """Exact log-orders for levels 0..N and the obstructions they determine.

    ``o[n]`` is known for n = 0..N-1 since it needs the log-order at n + 1.
    """

    m: int
    log_orders: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.log_orders or self.log_orders[0] != 0:
            raise InputError("log_orders must start with log(0) = 0")
        object.__setattr__(self, "log_orders", tuple(Fraction(x) for x in self.log_orders))

    @property
    def levels(self) -> int:
        return len(self.log_orders) - 1

    @property
    def layer_logs(self) -> tuple[Fraction, ...]:
        lo = self.log_orders
        return tuple(lo[n + 1] - lo[n] for n in range(len(lo) - 1))

    @property
    def o(self) -> tuple[Fraction, ...]:
        L = self.layer_logs
        if not L:
            return ()
        return (-L[0],) + tuple(self.m * L[n - 1] - L[n] for n in range(1, len(L)))

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.log_orders)


def reconstruction(o: Sequence[Fraction | int], m: int) -> list[Fraction]:
    """Log-orders log(0), ..., log(len(o)) regenerated from an obstruction series."""
    out = [Fraction(0)]
    L = None
    for n, x in enumerate(o):
        L = -Fraction(x) if n == 0 else m * L - Fraction(x)
        out.append(out[-1] + L)
    return out


def sigma_labelled(G: GroupSpec) -> bool:
    """Whether every label of every generator is a power of x -> x + 1."""
    from .basilica import label_is_sigma_power

    for g in G.generators:
        mach = g.machine
        if not all(label_is_sigma_power(p) for p in mach.perms):
            return False
    return True


def log_orders(G: GroupSpec, N: int, point_cap: int = POINT_CAP) -> list[Fraction]:
    """Exact ``log_m |G/St_G(n)|`` for n = 0..N."""
    Q = level_quotient(G, N, point_cap)
    return [exact_log(x, G.m) for x in Q.level_orders]


def obstruction_series(G: GroupSpec, N: int, point_cap: int = POINT_CAP) -> ObstructionSeries:
    """Measured series of obstructions from the level quotients up to level N.

    Dimensions are taken relative to the group of all automorphisms with
    labels in <sigma>; groups with other labels are refused.
    """
    if N < 1:
        raise InputError("need at least one level")
    if not sigma_labelled(G):
        raise InputError("labels outside the cyclic group generated by x -> x+1: dimension not defined here")
    return ObstructionSeries(G.m, tuple(log_orders(G, N, point_cap)))


def normalized(series: ObstructionSeries, n: int) -> Fraction:
    """``(m-1) log(n) / m^n``; its liminf over n is the Hausdorff dimension."""
    m = series.m
    return (m - 1) * series.log_orders[n] / Fraction(m) ** n


def dimension_estimate(series: ObstructionSeries, N: int) -> Fraction:
    """``1 - sum_{i=1..N} (m^-i - m^-(N+1)) o(i)``; needs log-orders up to level N+1."""
    o = series.o
    if N + 1 > series.levels:
        raise InputError(f"truncation {N} needs log-orders up to level {N + 1}")
    m = Fraction(series.m)
    tail = m ** -(N + 1)
    return 1 - sum((m**-i - tail) * o[i] for i in range(1, N + 1))


def predicted_bp_obstructions(o_G: Sequence[Fraction | int], s: int, N: int) -> list[Fraction]:
    """Obstructions of the s-th Basilica group from those of G, for n = 0..N.

    o_B(0) = o_G(0); for n >= 1, o_B(n) = o_G(n/s) when s divides n and 0
    otherwise.  Needs o_G up to index N // s.
    """
    if s < 1:
        raise InputError("s must be at least 1")
    if len(o_G) <= N // s:
        raise InputError(f"need o_G up to index {N // s}")
    out = [Fraction(o_G[0])]
    for n in range(1, N + 1):
        out.append(Fraction(o_G[n // s]) if n % s == 0 else Fraction(0))
    return out


def odometer_obstructions(m: int, N: int) -> list[Fraction]:
    """The series -1, m-1, m-1, ... of the odometer and of its d-fold products."""
    return [Fraction(-1)] + [Fraction(m - 1)] * N


def closed_form_generalised(m: int, s: int) -> Fraction:
    """Hausdorff dimension m(m^(s-1) - 1)/(m^s - 1) of the generalised Basilica groups."""
    if m < 2 or s < 1:
        raise InputError("need m >= 2 and s >= 1")
    return Fraction(m * (m ** (s - 1) - 1), m**s - 1)


def circulant_rank(p: int, e: Sequence[int]) -> int:
    """Rank over F_p of the p x p circulant matrix with first row (0, e_1, ..., e_{p-1})."""
    if len(e) != p - 1:
        raise InputError(f"defining vector needs {p - 1} entries")
    row = np.array([0] + [int(x) % p for x in e], dtype=np.int64)
    mat = np.stack([np.roll(row, k) for k in range(p)])
    return fp_rank(mat, p)


def ggs_dimension(p: int, t: int) -> Fraction:
    """t(p-1)/p^2."""
    return Fraction(t * (p - 1), p * p)


def ggs_bp_dimension(p: int, t: int, s: int) -> Fraction:
    """(p^(s-1) - 1)/p^(s-1) + t (p^s - 1)/p^(2s)."""
    return Fraction(p ** (s - 1) - 1, p ** (s - 1)) + Fraction(t * (p**s - 1), p ** (2 * s))


def ggs_predicted_obstructions(p: int, t: int, N: int) -> list[Fraction]:
    """-1, p - t, t, 0, 0, ... for a GGS group with circulant rank t < p."""
    out = [Fraction(-1), Fraction(p - t), Fraction(t)] + [Fraction(0)] * max(0, N - 2)
    return out[: N + 1]


def report_rows(series: ObstructionSeries) -> list[dict]:
    """One row per level: order, exact log, obstruction and normalised log-order."""
    rows = []
    o = series.o
    for n, lo in enumerate(series.log_orders):
        order = series.m ** int(lo) if lo.denominator == 1 else None
        rows.append({
            "n": n,
            "order": order,
            "log": str(lo),
            "o": str(o[n]) if n < len(o) else None,
            "estimate": str(normalized(series, n)),
        })
    return rows


def format_report(rows: Sequence[dict]) -> str:
    header = ("n", "order", "log", "o", "estimate")
    table = [header] + [tuple("-" if r[k] is None else str(r[k]) for k in header) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    return "\n".join(lines)
