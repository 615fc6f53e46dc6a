"""Command line interface.

Every command builds a report dictionary with a ``checks`` section; the
process exits with 0 exactly when all checks pass.  ``--format json``
prints the report as one JSON document.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import flows, groups, localization, models
from .algebra import FgAbGroup, RatMatrix, Ring
from .complex import EquivariantComplex, TruncationSpec, instantiate_window, validate
from .errors import ParseError, TateError
from .homology import homology
from .limits import (BidirectGrid, GridSpec, HorizonProbe, backwards_split, default_grid,
                     describe_limit, four_tate_groups, localize_module, sh_equivariant_module)
from .towers import Tower, TowerColimit, direct_limit, inverse_limit

EXAMPLES = ("cn", "t-star-s2", "torus", "rabinowitz", "rabinowitz-eq", "local")


# ---------------------------------------------------------------------------
# report plumbing


def plain(x):
    """Convert to JSON-native values so that reports survive a round trip."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if x is None or isinstance(x, str):
        return x
    if isinstance(x, FgAbGroup):
        return str(x)
    return str(x)


def make_report(command: str, config: dict, result: dict, checks: dict, text: str = "") -> dict:
    checks = {k: bool(v) for k, v in checks.items()}
    report = {"command": command, "config": plain(config), "result": plain(result),
              "checks": checks, "passed": all(checks.values())}
    report["_text"] = text
    return report


def emit(report: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps({k: v for k, v in report.items() if k != "_text"}, indent=1,
                          sort_keys=True)
    lines = [report.get("_text", "").rstrip()] if report.get("_text") else []
    for name, ok in report["checks"].items():
        lines.append(f"[{'pass' if ok else 'FAIL'}] {name}")
    lines.append("all checks passed" if report["passed"] else "some checks failed")
    return "\n".join(lines)


def parse(text: str) -> dict:
    return json.loads(text)


# ---------------------------------------------------------------------------
# inputs


def _bundle(args):
    """Example bundle, or a bare complex read from ``--file``."""
    if getattr(args, "file", None):
        try:
            with open(args.file) as fh:
                c = EquivariantComplex.from_json(fh.read(), name=args.file)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"cannot read {args.file}: {exc}") from exc
        bad = validate(c)
        if bad:
            raise ParseError("; ".join(str(v) for v in bad))
        return None, c
    ex = args.example
    K = args.horizon
    if ex == "cn":
        b = models.cn_complex(args.n, K)
    elif ex == "t-star-s2":
        c = [int(x) for x in args.weights.split(",")] if args.weights else None
        b = models.t_star_s2(K, models._extend(c, K) if c else None)
    elif ex == "torus":
        b = models.torus(args.n, args.class_bound)
    elif ex == "rabinowitz":
        b = models.rabinowitz_C()
    elif ex == "rabinowitz-eq":
        b = models.rabinowitz_C(True)
    elif ex == "local":
        b = models.local_orbit(args.n, args.parity, args.shift)
    else:
        raise ParseError(f"unknown example {ex!r}")
    return b, b.complex


def _window(args):
    lo, hi = args.window
    if lo > hi:
        raise ParseError("empty degree window")
    return (lo, hi)


def _grid(args, c, window, horizon):
    if args.a_list is None and args.b_list is None:
        return None
    base = default_grid(c, (window[0], window[1] + 1), horizon=horizon)
    a = [int(x) for x in args.a_list.split(",")] if args.a_list else base.aValues
    b = [Fraction(x) for x in args.b_list.split(",")] if args.b_list else base.bValues
    return GridSpec(tuple(a), tuple(b))


def _matrix(text: str) -> RatMatrix:
    try:
        rows = json.loads(text)
        return RatMatrix([[Fraction(str(x)) for x in r] for r in rows])
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad matrix {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_diagram(args) -> dict:
    bundle, c = _bundle(args)
    ring = Ring.parse(args.ring)
    window = _window(args)
    probe = None
    if bundle is not None and bundle.builder is not None and not args.no_probe:
        rule = bundle.expected.get("jp_rule") if ring is Ring.INT else None
        K = bundle.horizon
        probe = HorizonProbe(bundle.builder, tuple(sorted({max(K - 2, 2), K, K + 2})), rule)
    diagram = four_tate_groups(c, ring, window, _grid(args, c, window, probe is not None), probe)
    checks = {"squares commute where decided": all(e.commutes is not False
                                                   for e in diagram.degrees.values()),
              "rho is an isomorphism": all(e.rho.iso is not False
                                           for e in diagram.degrees.values())}
    exp = bundle.expected if bundle is not None else {}
    if bundle is not None and bundle.builder is not None and probe is None:
        # a truncation read as a complete complex: expected values do not apply
        exp = {}
    evens = [d for d in diagram.degrees if d % 2 == 0]
    odds = [d for d in diagram.degrees if d % 2]
    if exp and bundle.name.startswith("cn") and ring is Ring.INT:
        qc = {}
        for d in evens:
            for w in ("top", "jp"):
                v = getattr(diagram[d], w).value
                qc[(w, d)] = isinstance(v, TowerColimit) and v.q_criterion(depth=120)["holds"]
        checks["top and jp are Q (x) Lambda in even degrees"] = all(qc.values())
        checks["bottom and gw vanish"] = all(
            isinstance(getattr(e, w).value, FgAbGroup) and getattr(e, w).value.is_zero
            for e in diagram.degrees.values() for w in ("bottom", "gw"))
    elif "Rat" in exp and ring is Ring.RAT:
        want = exp["Rat"]
        for w in ("top", "jp", "bottom", "gw"):
            ranks = diagram.ranks(w)
            if isinstance(want[w], dict):
                ok = all(ranks[d] == want[w][d] for d in diagram.degrees)
            else:
                ok = all(ranks[d] == want[w] for d in evens) and all(ranks[d] == 0 for d in odds)
            checks[f"{w} ranks match"] = ok
    result = diagram.to_dict()
    return make_report("diagram", vars_of(args), result, checks, diagram.table())


def cmd_homology(args) -> dict:
    bundle, c = _bundle(args)
    window = _window(args)
    ring = Ring.parse(args.ring)
    b = Fraction(args.b) if args.b is not None else None
    w = instantiate_window(c, TruncationSpec(args.a, b, window, args.mu_upper))
    h = homology(w, ring)
    groups_ = {d: str(h[d]) for d in h.degrees}
    checks = {"d squared is zero": w.check_d_squared()}
    if bundle is not None and "homology" in bundle.expected and args.a is None and b is None:
        f = bundle.expected["homology"]
        checks["matches expected local homology"] = all(
            h[d] == f(d) for d in h.degrees) if ring is Ring.INT else True
    text = "\n".join(f"{d:>4}  {g}" for d, g in sorted(groups_.items()))
    return make_report("homology", vars_of(args), {"groups": groups_}, checks, text)


def cmd_localize(args) -> dict:
    checks, result, lines = {}, {}, []
    if args.counterexample:
        rep = localization.counterexample_probe(args.counterexample)
        result = rep
        checks = {"tate triple": rep["tate_triple"],
                  "T^k E pattern": all(rep["TkE_pattern"].values()),
                  "eventual image is zero": rep["V_T_dim"] == 0,
                  "classes agree up to sign": rep["classes_agree_up_to_sign"],
                  "HT shifts the classes": rep["HT_shift"],
                  "left side vanishes": rep["left"] == 0}
        lines = [f"{k}: {v}" for k, v in rep.items()]
    elif args.endo:
        T = _matrix(args.endo)
        d = _matrix(args.boundary) if args.boundary else None
        V = localization.LinearEndoSpace(T, d)
        loc = localization.localize(V, kmax=args.kmax)
        result["dim_V_T"] = loc.dim
        result["stabilizes_at"] = loc.V_T.index
        ck = loc.checks()
        checks["P T_bar = T P"] = loc.intertwines()
        checks["P injective"] = loc.P_injective
        checks["Q_k intertwine, injective, image V_T"] = all(all(v.values()) for v in ck.values())
        if loc.P_iso is not None:
            checks["P iso for invertible T"] = loc.P_iso
        if d is not None:
            cmp = localization.tate_triple_compare(V, args.kmax)
            result["triple"] = cmp.to_dict()
            if cmp.T_surjective:
                checks["both sides agree for surjective T"] = bool(cmp.equal)
        lines = [f"{k}: {v}" for k, v in result.items()]
    else:
        bundle, c = _bundle(args)
        window = _window(args)
        dims, T = sh_equivariant_module(c, window)
        loc = localize_module(dims, T, args.kmax)
        result = {"dims": dims, "localized": loc.dims, "status": loc.status}
        lo, hi = window
        inner = [d for d in range(lo, hi + 1) if loc.status.get(d) == "stable"]
        checks["some degree decided"] = bool(inner)
        lines = [f"{d:>4}  {dims[d]} -> {loc.dims.get(d)} ({loc.status.get(d)})"
                 for d in range(lo, hi + 1)]
    return make_report("localize", vars_of(args), result, checks, "\n".join(lines))


def cmd_towers(args) -> dict:
    bundle, c = _bundle(args)
    window = _window(args)
    ring = Ring.parse(args.ring)
    spec = _grid(args, c, window, False) or default_grid(c, window)
    grid = BidirectGrid(c, ring, spec, window)
    d = args.degree
    if d not in range(window[0] + 1, window[1]):
        raise ParseError(f"degree {d} is not interior to the window {window}")
    A, B = spec.aValues, spec.bValues
    table = {a: {b: str(grid.homology(a, b)[d]) for b in B} for a in A}
    rows, cols = {}, {}
    for j, b in enumerate(B):
        t = Tower([grid.homology(a, b)[d] for a in A], [grid.pi(i, j)[d] for i in range(len(A) - 1)],
                  "inverse", ring)
        cols[b] = describe_limit(inverse_limit(t))
    for i, a in enumerate(A):
        t = Tower([grid.homology(a, b)[d] for b in B], [grid.iota(i, j)[d] for j in range(len(B) - 1)],
                  "direct", ring)
        rows[a] = describe_limit(direct_limit(t))
    checks = {"grid squares commute": grid.squares_commute()}
    lines = ["a \\ b " + " ".join(f"{str(b):>8}" for b in B)]
    for a in A:
        lines.append(f"{a:>5} " + " ".join(f"{table[a][b]:>8}" for b in B) + f"   -> {rows[a]}")
    lines.append("lim_a " + " ".join(f"{cols[b]:>8}" for b in B))
    result = {"degree": d, "groups": table, "direct_limits": rows, "inverse_limits": cols}
    return make_report("towers", vars_of(args), result, checks, "\n".join(lines))


def cmd_backwards(args) -> dict:
    bundle, c = _bundle(args)
    window = _window(args)
    rep = backwards_split(c, window, args.a)
    checks = {"long exact sequence is exact": rep.exact,
              "chain-first and homology-first agree": all(rep.rho_iso.values())}
    lines = [f"{d:>4}  sub={v[0]} full={v[1]} quotient={v[2]}" for d, v in sorted(rep.groups.items())]
    return make_report("backwards", vars_of(args), rep.to_dict(), checks, "\n".join(lines))


def cmd_flow(args) -> dict:
    if args.system == "heat":
        rep = flows.heat_flow_check(args.x0, (0.0, args.s_end), args.tol)
        checks = {"closed form matched": rep["max_rel_error"] <= args.tol,
                  "sign preserved": rep["sign_kept"], "limit reached": rep["reached_limit"],
                  "phase constant": rep["y_constant"]}
        if args.x0 == 0:
            rep["stationary"] = True
        lines = [f"{k}: {v}" for k, v in rep.items()]
        return make_report("flow", vars_of(args), rep, checks, "\n".join(lines))
    lo, hi = args.modes
    if hi != lo + 1:
        raise ParseError("rabinowitz heteroclinics connect consecutive modes")
    h = flows.heteroclinic(lo)
    if args.dump:
        with open(args.dump, "w") as fh:
            fh.write(h.trajectory.dump())
    diag = h.diagnostics
    rep = {"from": lo, "to": hi, "action_start": h.action_start, "action_end": h.action_end,
           "closest_approach": h.closest, "launch_angle": h.angle, **diag}
    checks = {"start action is pi*l": abs(h.action_start - math.pi * lo) < 1e-6,
              "end action is pi*(l+1)": abs(h.action_end - math.pi * hi) < 1e-6,
              "invariant subspace kept": diag["invariant_drift"] <= 1e-12,
              "action nondecreasing": diag["action_monotone"],
              "gradient identity": diag["gradient_identity_error"] < 1e-6}
    lines = [f"{k}: {v}" for k, v in rep.items()]
    return make_report("flow", vars_of(args), rep, checks, "\n".join(lines))


def _sequence(spec: str) -> groups.IntSequence:
    spec = spec.strip()
    if spec == "k+1":
        return groups.IntSequence.successor()
    if spec in ("ones", "1"):
        return groups.IntSequence(())
    kind, _, rest = spec.partition(":")
    try:
        if kind == "periodic":
            return groups.IntSequence.periodic(int(x) for x in rest.split(","))
        if kind == "repeat":
            return groups.IntSequence.repeated(int(rest))
        if kind == "list":
            return groups.IntSequence([int(x) for x in rest.split(",")])
        if "," in spec:
            return groups.IntSequence.periodic(int(x) for x in spec.split(","))
    except ValueError as exc:
        raise ParseError(f"bad sequence {spec!r}") from exc
    raise ParseError(f"unknown sequence {spec!r}")


def cmd_group_qa(args) -> dict:
    a = _sequence(args.seq)
    depth = args.depth
    exp = groups.prime_expand(a, depth, scan=depth)
    # a prime p can only divide x_1 once the product a_1...a_l contains it,
    # so the probe only asks for primes up to the depth
    bound = min(97, depth)
    primes = [p for p in range(2, bound + 1) if groups.factorize(p) == [p]]
    x1 = groups.GaElement(1, 1)
    div = {p: groups.divisible(x1, p, a, depth) is True for p in primes}
    col = groups.as_colimit(a)
    crit = col.q_criterion(primes_upto=bound, depth=depth)
    result = {"prime_expansion": exp.primes[:30], "divisible_by": div,
              "torsion_free": crit["torsion_free"], "rank": crit["rank"]}
    checks = {"relabeling verified": exp.verified,
              "torsion-free": crit["torsion_free"], "rank one": crit["rank"] == 1}
    if not exp.primes:
        verdict = "isomorphic to Z"
    elif crit["holds"]:
        verdict = f"isomorphic to Q (primes up to {bound}, depth {depth})"
    else:
        bad = [p for p, ok in div.items() if not ok]
        verdict = f"criterion fails: not divisible by {bad[:5]}{'...' if len(bad) > 5 else ''}"
    result["verdict"] = verdict
    if args.seq.strip() == "k+1":
        ph = groups.phi_check(5)
        result["phi"] = ph
        checks["phi verified"] = all(ph.values())
    if crit["holds"]:
        target = groups.prime_expand(groups.IntSequence.successor(), 4 * depth).sequence()
        source = exp.sequence()
        try:
            h = groups.iso_h(source, target, K=min(12, len(exp.primes) - 1), samples=40)
            result["h"] = {"m": h.m, "c": h.c}
            checks["h verified"] = h.verified
        except TateError as exc:
            result["h"] = f"inconclusive: {exc}"
    lines = [f"sequence: {a.name}", f"prime expansion: {exp.primes[:20]}",
             f"torsion-free: {crit['torsion_free']}, rank: {crit['rank']}", f"verdict: {verdict}"]
    return make_report("group-qa", vars_of(args), result, checks, "\n".join(lines))


def cmd_xn_report(args) -> dict:
    reps = [models.xn_rank_report(n) for n in args.n_values]
    result = {str(r.n): r.to_dict() for r in reps}
    checks = {"d_n = n^2 + n + 2": all(r.d == r.n ** 2 + r.n + 2 for r in reps)}
    lines = [f"n={r.n}: d={r.d}, 2^n={r.two_n}, kappa {r.verdict}" for r in reps]
    return make_report("xn-report", vars_of(args), result, checks, "\n".join(lines))


def vars_of(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


# ---------------------------------------------------------------------------
# parser


def _add_input(p, window=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--example", choices=EXAMPLES, default="cn")
    g.add_argument("--file", help="complex in the JSON file format")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--horizon", type=int, default=6)
    p.add_argument("--weights", help="comma separated even weights for t-star-s2")
    p.add_argument("--class-bound", type=int, default=1)
    p.add_argument("--parity", choices=("good", "bad"), default="good")
    p.add_argument("--shift", type=int, default=0)
    if window:
        p.add_argument("--window", type=int, nargs=2, default=[-2, 8], metavar=("LO", "HI"))


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="symtate",
                                  description="Tate homology of filtered u-equivariant complexes")
    top.add_argument("--format", choices=("text", "json"), default="text")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagram", help="four limit groups and the canonical maps")
    _add_input(p)
    p.add_argument("--ring", default="q")
    p.add_argument("--a-list")
    p.add_argument("--b-list")
    p.add_argument("--no-probe", action="store_true", help="skip the horizon probe")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("homology", help="homology of one window")
    _add_input(p)
    p.add_argument("--ring", default="z")
    p.add_argument("--a", type=int)
    p.add_argument("--b")
    p.add_argument("--mu-upper", type=int)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("localize", help="localization of an endomorphism or a module")
    _add_input(p)
    p.add_argument("--endo", help="matrix of T as a JSON list of rows")
    p.add_argument("--boundary", help="matrix of the boundary as a JSON list of rows")
    p.add_argument("--counterexample", type=int, metavar="N")
    p.add_argument("--kmax", type=int, default=4)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("towers", help="grid of groups in one degree with row and column limits")
    _add_input(p)
    p.add_argument("--ring", default="q")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--a-list")
    p.add_argument("--b-list")
    p.set_defaults(func=cmd_towers)

    p = sub.add_parser("backwards", help="split at level zero and check the exact sequence")
    _add_input(p)
    p.add_argument("--a", type=int)
    p.set_defaults(func=cmd_backwards)

    p = sub.add_parser("flow", help="gradient flow checks")
    p.add_argument("system", choices=("heat", "rabinowitz"))
    p.add_argument("--x0", type=float, default=0.5)
    p.add_argument("--s-end", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--modes", type=int, nargs=2, default=[0, 1])
    p.add_argument("--dump", help="write the trajectory as columnar text")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("group-qa", help="checks on the groups G_a")
    p.add_argument("--seq", default="k+1",
                   help="k+1, ones, periodic:2,3, repeat:N or list:4,1,6")
    p.add_argument("--depth", type=int, default=50)
    p.set_defaults(func=cmd_group_qa)

    p = sub.add_parser("xn-report", help="rank comparison d_n against 2^n")
    p.add_argument("n_values", type=int, nargs="*", default=[4, 5, 6])
    p.set_defaults(func=cmd_xn_report)
    return top


def run(argv=None) -> dict:
    args = build_parser().parse_args(argv)
    return args.func(args)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except TateError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(emit(report, args.format))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
