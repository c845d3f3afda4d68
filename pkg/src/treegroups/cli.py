"""Command-line front end.

Exit codes: 0 computed or verified, 1 a check failed, 2 input error,
3 a resource cap was hit or the answer is inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import basilica, groups, hausdorff, lpres, zoo
from .errors import Inconclusive, InputError, ResourceError
from .groupfile import FILE_STATE_CAP, format_group_file, parse_group_file, parse_word
from .permgroups import POINT_CAP
from .tree_core import (
    GroupSpec,
    format_cycles,
    format_portrait,
    format_vertex,
    portrait,
    to_dot,
    vertex,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

CHECKS = ("transitive", "fractal", "strongly-fractal", "very-strongly-fractal",
          "contracting", "bounded", "self-similar")
DEPTH_CHECKS = ("transitive", "fractal", "strongly-fractal", "very-strongly-fractal")
LPRES_ACTIONS = ("verify", "abelianization", "gamma23", "relators", "stabilization")
OPTION_DEFAULTS = {"json": False, "point_cap": POINT_CAP, "state_cap": FILE_STATE_CAP,
                   "nucleus_cap": groups.NUCLEUS_SIZE_CAP}
ZOO = ("odometer", "basilica", "ggs", "grigorchuk", "gupta-sidki",
       "fabrykowski-gupta", "dihedral")


class Report:
    """Collects the output of one command as text lines and a JSON object."""

    def __init__(self, command: str):
        self.data: dict = {"command": command}
        self.lines: list[str] = []
        self.raw: str | None = None

    def put(self, key: str, value, text: str | None = None):
        self.data[key] = value
        if text is not None:
            self.lines.append(text)

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.data, sort_keys=True, indent=2, default=_jsonable) + "\n"
        if self.raw is not None:
            return self.raw
        return "\n".join(self.lines) + ("\n" if self.lines else "")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"not serialisable: {type(x).__name__}")


# ---------------------------------------------------------------------------
# helpers


def _read_group(args) -> GroupSpec:
    path = args.file
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_group_file(text, state_cap=args.state_cap)


def _elements(G: GroupSpec, word: str | None):
    """The element named by ``--word``, or every generator when absent."""
    if word is None:
        return list(G.items())
    return [(word, groups.evaluate_word(G, parse_word(word, G)))]


def _recognise_basilica(G: GroupSpec):
    """(d, s) when G is generated exactly by a generalised Basilica group's generators."""
    keys = [g.key() for g in G.generators]
    n = len(keys)
    for s in range(1, n + 1):
        if n % s:
            continue
        d = n // s
        for carry in sorted({0, G.m - 1}):
            ref = zoo.generalised_basilica(d, G.m, s, carry)
            if [g.key() for g in ref.generators] == keys:
                return d, s
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_info(args, rep: Report) -> int:
    G = _read_group(args)
    gens = []
    for name, g in G.items():
        gens.append({"name": name, "states": g.num_states,
                     "root": format_cycles(g.root_perm), "bounded": groups.is_bounded(g)})
    rep.put("alphabet", G.m, f"alphabet {G.m}")
    rep.put("generators", gens)
    rep.put("sigma_labelled", hausdorff.sigma_labelled(G))
    for row in gens:
        rep.lines.append(f"{row['name']}: {row['states']} states, root {row['root']}, "
                         f"{'bounded' if row['bounded'] else 'unbounded'}")
    rep.lines.append(f"labels in <sigma>: {'yes' if rep.data['sigma_labelled'] else 'no'}")
    return EXIT_OK


def cmd_act(args, rep: Report) -> int:
    G = _read_group(args)
    g = groups.evaluate_word(G, parse_word(args.word, G))
    v = vertex(args.vertex, G.m)
    image = format_vertex(g.act(v))
    rep.put("word", args.word)
    rep.put("vertex", format_vertex(v))
    rep.put("image", image, image)
    return EXIT_OK


def cmd_portrait(args, rep: Report) -> int:
    G = _read_group(args)
    out = {}
    for name, g in _elements(G, args.word):
        p = portrait(g, args.depth)
        out[name] = {format_vertex(u): format_cycles(lab) for u, lab in sorted(p.labels.items())
                     if not all(i == x for i, x in enumerate(lab))}
        rep.lines.append(f"{name}:")
        rep.lines.append(format_portrait(p, skip_identity=True))
    rep.put("depth", args.depth)
    rep.put("portraits", out)
    return EXIT_OK


def cmd_bp(args, rep: Report) -> int:
    G = _read_group(args)
    B = basilica.bp_generators(G, args.s)
    text = format_group_file(B)
    rep.put("s", args.s)
    rep.put("group_file", text)
    rep.raw = text
    return EXIT_OK


def cmd_quotient(args, rep: Report) -> int:
    G = _read_group(args)
    Q = groups.level_quotient(G, args.level, args.point_cap, args.engine)
    rep.put("level", args.level)
    rep.put("degree", Q.degree)
    rep.put("engine", Q.engine)
    rep.put("order", str(Q.order))
    rep.put("level_orders", [str(x) for x in Q.level_orders])
    try:
        lo = Q.log_order()
    except InputError:
        lo = None
    rep.put("log_order", None if lo is None else str(lo))
    rep.lines.append(f"level {args.level} ({Q.degree} points, {Q.engine})")
    rep.lines.append(f"order {Q.order}" + ("" if lo is None else f" = {G.m}^{lo}"))
    return EXIT_OK


def cmd_obstructions(args, rep: Report) -> int:
    G = _read_group(args)
    series = hausdorff.obstruction_series(G, args.levels, args.point_cap)
    rows = hausdorff.report_rows(series)
    rep.put("m", G.m)
    rep.put("levels", args.levels)
    rep.put("rows", rows, hausdorff.format_report(rows))
    return EXIT_OK


def cmd_hausdorff(args, rep: Report) -> int:
    G = _read_group(args)
    N = args.levels
    series = hausdorff.obstruction_series(G, N + 1, args.point_cap)
    estimate = hausdorff.dimension_estimate(series, N)
    rep.put("m", G.m)
    rep.put("truncation", N)
    rep.put("log_orders", [str(x) for x in series.log_orders])
    rep.put("obstructions", [str(x) for x in series.o])
    rep.put("estimate", str(estimate))
    rep.put("estimate_float", float(estimate))
    rep.lines.append("log orders: " + " ".join(str(x) for x in series.log_orders[1:]))
    rep.lines.append("obstructions: " + " ".join(str(x) for x in series.o))
    rep.lines.append(f"partial estimate (N = {N}): {estimate} ~ {float(estimate):.6f}")
    found = _recognise_basilica(G)
    if found is not None:
        d, s = found
        closed = hausdorff.closed_form_generalised(G.m, s)
        rep.put("recognised", {"family": "generalised-basilica", "d": d, "m": G.m, "s": s})
        rep.put("closed_form", str(closed))
        rep.lines.append(f"generalised Basilica group d={d} m={G.m} s={s}: "
                         f"closed form {closed} ~ {float(closed):.6f}")
    else:
        rep.put("recognised", None)
        rep.put("closed_form", None)
    return EXIT_OK


def cmd_check(args, rep: Report) -> int:
    G = _read_group(args)
    prop, depth = args.property, args.depth
    detail = None
    if prop == "transitive":
        ok = groups.is_spherically_transitive(G, depth, args.point_cap)
    elif prop == "fractal":
        ok = groups.is_fractal_at(G, depth, args.point_cap)
    elif prop == "strongly-fractal":
        ok = groups.is_strongly_fractal_at(G, depth, args.point_cap)
    elif prop == "very-strongly-fractal":
        ok = groups.is_very_strongly_fractal_at(G, depth, args.point_cap)
    elif prop == "contracting":
        N = groups.nucleus(G, size_cap=args.nucleus_cap)
        ok = groups.nucleus_is_closed(N)
        detail = {"nucleus_size": len(N)}
        rep.lines.append(f"nucleus size {len(N)}")
    elif prop == "bounded":
        flags = {name: groups.is_bounded(g) for name, g in G.items()}
        ok = all(flags.values())
        detail = {"generators": flags}
        for name, b in flags.items():
            rep.lines.append(f"{name}: {'bounded' if b else 'unbounded'}")
    else:
        ok = groups.is_self_similar_closed(G)
    rep.put("property", prop)
    rep.put("depth", depth)
    where = f" at depth {depth}" if prop in DEPTH_CHECKS else ""
    rep.put("holds", ok, f"{prop}{where}: {'yes' if ok else 'no'}")
    if detail is not None:
        rep.put("detail", detail)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_stab_verify(args, rep: Report) -> int:
    d, m, s, n = args.d, args.m, args.s, args.n
    depth = n + 2 if args.depth is None else args.depth
    B = zoo.generalised_basilica(d, m, s)
    words = groups.gen_basilica_stabilizer_words(d, m, s, n)
    ok = groups.verify_stabilizer_generators(B, words, n, depth, args.point_cap)
    claimed = [f"{w[0][0]}^{w[0][1]}" for w in words]
    rep.put("group", {"d": d, "m": m, "s": s})
    rep.put("n", n)
    rep.put("depth", depth)
    rep.put("claimed", claimed)
    rep.lines.append("claimed: " + " ".join(claimed))
    rep.put("holds", ok, f"normal closure equals St({n}) at depth {depth}: {'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_lpres(args, rep: Report) -> int:
    P = lpres.LPresentation(args.d, args.m, args.s)
    rep.put("group", {"d": args.d, "m": args.m, "s": args.s})
    rep.put("rmax", args.rmax)
    rep.put("vbox", args.vbox)
    words = lpres.relators(P, args.rmax, args.vbox)
    if args.relators:
        with open(args.relators, encoding="utf-8") as fh:
            words += lpres.parse_relators(fh.read())
    action = args.action
    if action == "relators":
        text = lpres.format_relators(words)
        rep.put("relators", [w.to_text() for w in words])
        rep.raw = text
        return EXIT_OK
    if action == "verify":
        B = zoo.generalised_basilica(args.d, args.m, args.s)
        bad = lpres.failing_relators(B, words)
        rep.put("checked", len(words), f"{len(words)} relators checked")
        rep.put("failing", [w.to_text() for w in bad])
        for w in bad:
            rep.lines.append(f"not the identity: {w.to_text()}")
        rep.put("holds", not bad, "all relators are the identity" if not bad else "relator check failed")
        return EXIT_OK if not bad else EXIT_FAILED
    if action == "abelianization":
        ok = lpres.abelianization_check(P, 0, 0, extra=words)
        rep.put("holds", ok, "all relators lie in the commutator subgroup" if ok
                else "a relator has non-zero exponent sum")
        return EXIT_OK if ok else EXIT_FAILED
    if action == "stabilization":
        ok = lpres.phi_stabilization(P, args.rmax, args.vbox)
        rep.put("holds", ok, f"Phi-images stable at r_max = {args.rmax}: {'yes' if ok else 'no'}")
        return EXIT_OK if ok else EXIT_FAILED
    Q = lpres.class2_quotient(P, args.rmax, args.vbox)
    rep.put("torsion", list(Q.torsion))
    rep.put("free_rank", Q.free_rank)
    rep.put("torsion_order", Q.torsion_order)
    parts = [f"Z^{Q.free_rank}"] if Q.free_rank else []
    parts += [f"C_{t}" for t in Q.torsion]
    rep.lines.append("gamma_2/gamma_3 = " + (" x ".join(parts) if parts else "1"))
    return EXIT_OK


def cmd_zoo(args, rep: Report) -> int:
    name = args.family
    if name == "odometer":
        G = zoo.odometer_product(args.m, args.d, args.carry)
    elif name == "basilica":
        G = zoo.generalised_basilica(args.d, args.m, args.s, args.carry)
    elif name == "ggs":
        if args.e is None:
            raise InputError("ggs needs --e, the defining vector")
        G = zoo.ggs((args.p, [int(x) for x in args.e.split(",")]))
    elif name == "grigorchuk":
        G = zoo.grigorchuk()
    elif name == "gupta-sidki":
        G = zoo.gupta_sidki(args.p)
    elif name == "fabrykowski-gupta":
        G = zoo.fabrykowski_gupta()
    else:
        G = zoo.infinite_dihedral()
    if args.s_bp > 1:
        G = basilica.bp_generators(G, args.s_bp)
    text = format_group_file(G)
    rep.put("family", name)
    rep.put("group_file", text)
    rep.raw = text
    return EXIT_OK


def cmd_dot(args, rep: Report) -> int:
    G = _read_group(args)
    chunks = [to_dot(g, name) for name, g in _elements(G, args.word)]
    text = "\n".join(chunks) + "\n"
    rep.put("dot", chunks)
    rep.raw = text
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    # options are accepted before or after the subcommand; SUPPRESS keeps a
    # subparser from overwriting a value given before it, and run() fills in
    # OPTION_DEFAULTS afterwards (set_defaults would mutate the shared actions)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--point-cap", type=int, default=argparse.SUPPRESS,
                        help=f"largest permutation degree (default {POINT_CAP})")
    common.add_argument("--state-cap", type=int, default=argparse.SUPPRESS,
                        help=f"largest machine built from a group file (default {FILE_STATE_CAP})")
    common.add_argument("--nucleus-cap", type=int, default=argparse.SUPPRESS,
                        help=f"largest nucleus searched (default {groups.NUCLEUS_SIZE_CAP})")

    parser = argparse.ArgumentParser(prog="treegroups", parents=[common],
                                     description="Automaton groups on regular rooted trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name, help_text, *leading):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for args, kwargs in leading:
            p.add_argument(*args, **kwargs)
        p.add_argument("file", nargs="?", default="-", help="group file ('-' or absent: stdin)")
        return p

    with_file("info", "summarise the generators").set_defaults(func=cmd_info)

    p = with_file("act", "image of a vertex")
    p.add_argument("--word", required=True, help="element, e.g. 'a*b^-1'")
    p.add_argument("--vertex", required=True, help="vertex as a digit string, e.g. 0110")
    p.set_defaults(func=cmd_act)

    p = with_file("portrait", "non-trivial labels down to a depth")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--word", help="element to draw (default: every generator)")
    p.set_defaults(func=cmd_portrait)

    p = with_file("bp", "generators of the s-th Basilica group, as a group file")
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_bp)

    p = with_file("quotient", "order of the level-n congruence quotient")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--engine", choices=("auto", "layered", "schreier-sims"), default="auto")
    p.set_defaults(func=cmd_quotient)

    p = with_file("obstructions", "series of obstructions up to a level")
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=cmd_obstructions)

    p = with_file("hausdorff", "partial Hausdorff dimension estimate at truncation N")
    p.add_argument("--levels", type=int, required=True)
    p.set_defaults(func=cmd_hausdorff)

    p = with_file("check", "structural property at a truncation depth",
                  (("property",), {"choices": CHECKS}))
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("stab-verify", parents=[common],
                       help="verify layer-stabiliser generators of a generalised Basilica group")
    for flag, default in (("--d", 1), ("--m", 2), ("--s", 2)):
        p.add_argument(flag, type=int, default=default)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, default=None, help="quotient level (default n + 2)")
    p.set_defaults(func=cmd_stab_verify)

    p = sub.add_parser("lpres", parents=[common], help="L-presentation of a generalised Basilica group")
    p.add_argument("action", choices=LPRES_ACTIONS)
    for flag, default in (("--d", 1), ("--m", 2), ("--s", 2), ("--rmax", 3), ("--vbox", 1)):
        p.add_argument(flag, type=int, default=default)
    p.add_argument("--relators", help="file of extra relators, one word per line")
    p.set_defaults(func=cmd_lpres)

    p = sub.add_parser("zoo", parents=[common], help="emit a group file for a standard example")
    p.add_argument("family", choices=ZOO)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--s", type=int, default=2, help="Basilica parameter of the basilica family")
    p.add_argument("--carry", type=int, default=0, help="letter carrying the odometer recursion")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--e", help="GGS defining vector, comma separated")
    p.add_argument("--bp", dest="s_bp", type=int, default=1,
                   help="apply the s-th Basilica operation to the result")
    p.set_defaults(func=cmd_zoo)

    p = with_file("dot", "Graphviz drawing of the machine")
    p.add_argument("--word", help="element to draw (default: every generator)")
    p.set_defaults(func=cmd_dot)
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # an optional positional file is skipped by argparse when a flag sits
        # between it and the other positionals, so pick it up here
        if (len(extra) == 1 and not extra[0].startswith("-")
                and getattr(args, "file", None) == "-"):
            args.file = extra[0]
        elif extra:
            parser.error("unrecognized arguments: " + " ".join(extra))
        for key, value in OPTION_DEFAULTS.items():
            if not hasattr(args, key):
                setattr(args, key, value)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (ResourceError, Inconclusive, MemoryError) as exc:
        print(f"resource: {exc or 'out of memory'}", file=err)
        return EXIT_RESOURCE
    rep.put("exit_code", code)
    out.write(rep.render(args.json))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
