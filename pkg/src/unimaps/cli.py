"""Command-line front end: census generation, formula verification,
bijection application, and fiber listings.

All output on standard output is byte-deterministic for a fixed input
and version: JSON is emitted with sorted keys and canonical separators,
counts as decimal strings.  Exit codes: 0 success, 1 verification
failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from math import comb, factorial

from .bijections import (
    phi,
    phi_inverse,
    psi,
    psi_fiber,
    upsilon_fiber,
)
from .enumeration import (
    CountTable,
    _matchings,
    _vertex_count,
    gen_tree_rooted_maps,
    gen_unicellular,
    planar_census,
    surjection_count,
    vertex_profile,
)
from .formulas import (
    double_factorial,
    hz_recurrence_check,
    jackson_formula,
    ledoux_check,
    t_formula,
    u_formula,
    u_hat_formula,
)
from .maps_core import ColoredUnicellularMap, PolygonGluing, RootedMap, \
    glue_polygon
from .planar_closure import (
    NearEulerianTree,
    PlaneMap,
    closure_gamma,
    gen_near_eulerian_trees,
    gen_plane_maps,
    opening_delta,
)
from .series import (
    check_a_combination,
    check_algebraic_P,
    check_q_pde,
    check_qfd,
    check_rec_hp,
    p_series,
    q_from_p,
)

SCHEMA = 1


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at character {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Input literals


def _split_fields(text: str) -> dict:
    """Split ``key=value; key=value`` into a dict, tracking positions."""
    fields = {}
    pos = 0
    for chunk in text.split(";"):
        stripped = chunk.strip()
        if stripped:
            if "=" not in stripped:
                raise ParseError(f"expected key=value, got {stripped!r}",
                                 pos + chunk.index(stripped[0]))
            key, value = stripped.split("=", 1)
            fields[key.strip()] = (value.strip(), pos)
        pos += len(chunk) + 1
    return fields


def _int_tuple(value: str, position: int) -> tuple:
    inner = value.strip()
    if inner.startswith("(") and inner.endswith(")"):
        inner = inner[1:-1]
    try:
        return tuple(int(tok) for tok in inner.replace(",", " ").split())
    except ValueError:
        raise ParseError(f"expected integers, got {value!r}", position)


def parse_gluing(text: str) -> ColoredUnicellularMap:
    """Parse ``n=<int>; pairs=(a b[!], ...)`` with optional ``colors=``
    and ``labels=`` fields; ``!`` marks a twisted pair."""
    fields = _split_fields(text)
    for key in ("n", "pairs"):
        if key not in fields:
            raise ParseError(f"missing field {key!r}", 0)
    value, pos = fields["n"]
    try:
        n = int(value)
    except ValueError:
        raise ParseError(f"n must be an integer, got {value!r}", pos)
    value, pos = fields["pairs"]
    inner = value.strip()
    if not (inner.startswith("(") and inner.endswith(")")):
        raise ParseError("pairs must be parenthesized", pos)
    pairs, twists = [], []
    for part in inner[1:-1].split(","):
        part = part.strip()
        if not part:
            continue
        twist = part.endswith("!")
        toks = part.rstrip("!").split()
        if len(toks) != 2:
            raise ParseError(f"pair needs two sides, got {part!r}", pos)
        try:
            pairs.append((int(toks[0]), int(toks[1])))
        except ValueError:
            raise ParseError(f"pair sides must be integers: {part!r}", pos)
        twists.append(twist)
    try:
        gluing = PolygonGluing(n, tuple(pairs), tuple(twists))
    except ValueError as exc:
        raise ParseError(str(exc), pos)
    v = glue_polygon(gluing).vertex_count
    if "colors" in fields:
        colors = _int_tuple(*fields["colors"])
    else:
        colors = tuple(range(1, v + 1))
    labels = _int_tuple(*fields["labels"]) if "labels" in fields else None
    try:
        return ColoredUnicellularMap(gluing, colors,
                                     max(colors, default=0), labels)
    except ValueError as exc:
        raise ParseError(str(exc), fields.get("colors", ("", 0))[1])


def parse_rotation(text: str):
    """Parse ``sigma=(...); alpha=(...); root=k`` with optional
    ``outer=k``; returns a RootedMap or, with ``outer``, a PlaneMap."""
    fields = _split_fields(text)
    for key in ("sigma", "alpha"):
        if key not in fields:
            raise ParseError(f"missing field {key!r}", 0)
    sigma = _int_tuple(*fields["sigma"])
    alpha = _int_tuple(*fields["alpha"])
    root = int(fields["root"][0]) if "root" in fields else 0
    try:
        m = RootedMap(sigma, alpha, root)
        if "outer" in fields:
            return PlaneMap(m, int(fields["outer"][0]))
        return m
    except ValueError as exc:
        raise ParseError(str(exc), fields["sigma"][1])


def parse_tree(text: str) -> NearEulerianTree:
    """Parse ``sigma=(...); mate=(...); out=(...); tails=(...)`` where
    ``mate`` is -1 on bud slots."""
    fields = _split_fields(text)
    for key in ("sigma", "mate"):
        if key not in fields:
            raise ParseError(f"missing field {key!r}", 0)
    sigma = _int_tuple(*fields["sigma"])
    mate = _int_tuple(*fields["mate"])
    out = _int_tuple(*fields["out"]) if "out" in fields else ()
    tails = _int_tuple(*fields["tails"]) if "tails" in fields else ()
    root = int(fields["root"][0]) if "root" in fields else 0
    try:
        return NearEulerianTree(sigma, mate, frozenset(out),
                                frozenset(tails), root)
    except ValueError as exc:
        raise ParseError(str(exc), fields["sigma"][1])


# ---------------------------------------------------------------------------
# JSON emission


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True,
                                separators=(",", ":")) + "\n")


def _table_payload(family: str, bounds: dict, table: CountTable) -> dict:
    return {
        "schema": SCHEMA,
        "family": family,
        "bounds": bounds,
        "entries": [[list(k), str(v)] for k, v in table.items() if v],
        "total": str(table.total()),
    }


def _emit_table(payload: dict, fmt: str) -> None:
    if fmt == "json":
        _emit(payload)
        return
    width = max(len(k) for k, _ in payload["entries"]) if payload["entries"] \
        else 0
    header = ",".join(f"key{i}" for i in range(width)) + ",count"
    sys.stdout.write(header + "\n")
    for key, count in payload["entries"]:
        sys.stdout.write(",".join(str(x) for x in key) + "," + count + "\n")


def _map_payload(m: RootedMap) -> dict:
    return {"sigma": list(m.sigma), "alpha": list(m.alpha), "root": m.root}


def _tree_payload(t: NearEulerianTree) -> dict:
    return {"sigma": list(t.sigma), "mate": list(t.mate),
            "out": sorted(t.out_buds), "tails": sorted(t.tails),
            "root": t.root}


# ---------------------------------------------------------------------------
# census


def _profile_slice(args):
    n, orientable_only, partner = args
    table = {}
    sides = [s for s in range(1, 2 * n) if s != partner]
    masks = (0,) if orientable_only else range(1 << n)
    for sub in _matchings(sides):
        pairs = [(0, partner)] + sub
        for mask in masks:
            key = (n, _vertex_count(n, pairs, mask))
            table[key] = table.get(key, 0) + 1
    return table


def _profile_parallel(n: int, orientable_only: bool, threads: int) \
        -> CountTable:
    table = CountTable()
    jobs = [(n, orientable_only, partner) for partner in range(1, 2 * n)]
    if threads <= 1 or n <= 2:
        parts = map(_profile_slice, jobs)
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_profile_slice, jobs))
    for part in parts:
        for key in sorted(part):
            table.add(key, part[key])
    return table


def _cached(cache_dir, name, params, build):
    if cache_dir is None:
        return build()
    from .cache import load_census, store_census
    table = load_census(cache_dir, name, params)
    if table is None:
        table = build()
        store_census(cache_dir, name, params, table)
    return table


def cmd_census(args) -> int:
    family = args.family
    cache_dir = args.cache
    if family in ("unicellular-orientable", "unicellular-general"):
        if args.n is None:
            raise SystemExit2("family requires --n")
        orientable = family == "unicellular-orientable"
        table = _cached(cache_dir, family, {"n": args.n},
                        lambda: _profile_parallel(args.n, orientable,
                                                  args.threads))
        bounds = {"n": args.n}
    elif family == "planar-pqr":
        if args.max_edges is None:
            raise SystemExit2("family requires --max-edges")
        table = planar_census(args.max_edges, cache_dir=cache_dir)
        bounds = {"max_edges": args.max_edges}
    elif family == "tree-rooted":
        if args.n is None:
            raise SystemExit2("family requires --n")

        def build():
            table = CountTable()
            for q in range(1, args.n + 2):
                table[(args.n, q)] = sum(
                    1 for _ in gen_tree_rooted_maps(args.n, q))
            return table
        table = _cached(cache_dir, family, {"n": args.n}, build)
        bounds = {"n": args.n}
    else:  # pragma: no cover - argparse restricts choices
        raise SystemExit2(f"unknown family {family!r}")
    _emit_table(_table_payload(family, bounds, table), args.format)
    return 0


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


# ---------------------------------------------------------------------------
# verify


def _first_bad(verdicts):
    for verdict in verdicts:
        if not verdict.ok:
            return {"detail": verdict.detail, "lhs": repr(verdict.lhs),
                    "rhs": repr(verdict.rhs)}
    return None


def _check_gluing_totals(bound, cache_dir):
    for n in range(1, bound + 1):
        orientable = vertex_profile(n, True).total()
        total = vertex_profile(n).total()
        if orientable != double_factorial(2 * n - 1):
            return {"n": n, "orientable": orientable}
        if total != 2 ** n * double_factorial(2 * n - 1):
            return {"n": n, "total": total}
    return None


def _check_t_formula(bound, cache_dir):
    for n in range(1, bound + 1):
        eps = vertex_profile(n, True)
        for q in range(1, n + 2):
            direct = sum(eps[(n, v)] * surjection_count(v, q)
                         for v in range(1, n + 2))
            if direct != t_formula(n, q):
                return {"n": n, "q": q, "direct": direct,
                        "formula": t_formula(n, q)}
    return None


def _check_jackson(bound, cache_dir):
    for n in range(1, bound + 1):
        by_pq = {}
        for g in gen_unicellular(n, orientable_only=True):
            classes = glue_polygon(g).vertex_classes
            # one-face bipartite maps have corners alternating by side
            if any(len({c % 2 for c in cls}) != 1 for cls in classes):
                continue
            even = [cls for cls in classes if cls[0] % 2 == 0]
            odd = [cls for cls in classes if cls[0] % 2 == 1]
            for p in range(1, len(even) + 1):
                for q in range(1, len(odd) + 1):
                    by_pq[(n, p, q)] = by_pq.get((n, p, q), 0) + \
                        surjection_count(len(even), p) * \
                        surjection_count(len(odd), q)
        for p in range(1, n + 2):
            for q in range(1, n + 2):
                brute = by_pq.get((n, p, q), 0)
                if brute != jackson_formula(n, p, q):
                    return {"n": n, "p": p, "q": q, "brute": brute,
                            "formula": jackson_formula(n, p, q)}
    return None


def _check_u_formula(bound, cache_dir):
    census = planar_census(bound, cache_dir=cache_dir)
    for n in range(1, bound + 1):
        eta = vertex_profile(n)
        for q in range(1, n + 2):
            direct = sum(eta[(n, v)] * surjection_count(v, q)
                         for v in range(1, n + 2))
            if direct != u_formula(n, q, census):
                return {"n": n, "q": q, "direct": direct,
                        "formula": u_formula(n, q, census)}
    return None


def _check_u_hat(bound, cache_dir):
    census = planar_census(bound, cache_dir=cache_dir)
    for n in range(1, bound + 1):
        for N in range(1, n + 3):
            direct = sum(comb(N, q) * u_formula(n, q, census)
                         for q in range(1, N + 1))
            if direct != u_hat_formula(n, N):
                return {"n": n, "N": N, "direct": direct,
                        "formula": u_hat_formula(n, N)}
    return None


def _eps_eta_table(bound, orientable_only):
    table = CountTable()
    for n in range(1, bound + 1):
        table.merge(vertex_profile(n, orientable_only))
    return table


def _check_hz(bound, cache_dir):
    eps = _eps_eta_table(bound, True)
    return _first_bad(hz_recurrence_check(eps, n, v)
                      for n in range(1, bound + 1)
                      for v in range(1, n + 2))


def _check_ledoux(bound, cache_dir):
    eta = _eps_eta_table(bound, False)
    return _first_bad(ledoux_check(eta, n, v)
                      for n in range(2, bound + 1)
                      for v in range(1, n + 2))


def _colored_stream(n, orientable_only):
    for g in gen_unicellular(n, orientable_only):
        v = glue_polygon(g).vertex_count
        for q in range(1, v + 1):
            for colors in itertools.product(range(1, q + 1), repeat=v):
                if set(colors) == set(range(1, q + 1)):
                    yield ColoredUnicellularMap(g, colors, q)


def _check_phi_roundtrip(bound, cache_dir):
    for n in range(1, bound + 1):
        for u in _colored_stream(n, True):
            if phi_inverse(phi(u)) != u:
                return {"n": n, "gluing": list(u.gluing.pairs)}
    return None


def _check_psi_fibers(bound, cache_dir):
    for n in range(1, bound + 1):
        for u in _colored_stream(n, False):
            fiber = psi_fiber(u)
            w = fiber[0].external_weight
            if len(fiber) != 2 ** w or any(psi(p) != u for p in fiber):
                return {"n": n, "gluing": list(u.gluing.pairs),
                        "fiber_size": len(fiber), "w": w}
    return None


def _check_gamma_roundtrip(bound, cache_dir):
    for t in gen_near_eulerian_trees(2 * bound):
        if opening_delta(closure_gamma(t)) != t:
            return {"tree": _tree_payload(t)}
    for p in gen_plane_maps(bound):
        p2 = closure_gamma(opening_delta(p))
        if p2.m != p.m or p2.outer != p.outer:
            return {"map": _map_payload(p.m), "outer": p.outer}
    return None


def _check_planar_totals(bound, cache_dir):
    census = planar_census(bound, cache_dir=cache_dir)
    for e in range(1, bound + 1):
        total = sum(c for (q, r), c in census.items() if q + r - 2 == e)
        expect = 2 * 3 ** e * factorial(2 * e) // (
            factorial(e) * factorial(e + 2))
        if total != expect:
            return {"edges": e, "total": total, "expected": expect}
    return None


def _check_algebraic_p(bound, cache_dir):
    census = planar_census(max(bound - 2, 1), cache_dir=cache_dir)
    verdict = check_algebraic_P(p_series(census, bound))
    return None if verdict.ok else {"detail": verdict.detail}


def _check_q_pde(bound, cache_dir):
    census = planar_census(bound, cache_dir=cache_dir)
    verdict = check_q_pde(q_from_p(census, bound - 2))
    return None if verdict.ok else {"detail": verdict.detail}


def _check_rec_hp(bound, cache_dir):
    census = planar_census(bound + 3, cache_dir=cache_dir)
    verdict = check_rec_hp(census, bound)
    return None if verdict.ok else {"detail": verdict.detail}


def _check_a_combination(bound, cache_dir):
    census = planar_census(bound, cache_dir=cache_dir)
    verdict = check_a_combination(p_series(census, bound + 2))
    return None if verdict.ok else {"detail": verdict.detail}


def _check_qfd(bound, cache_dir):
    verdict = check_qfd(_eps_eta_table(bound, False), bound)
    return None if verdict.ok else {"detail": verdict.detail}


# name -> (bound meaning, default bound, function)
CHECKS = {
    "gluing-totals": ("max_n", 5, _check_gluing_totals),
    "t-formula": ("max_n", 4, _check_t_formula),
    "jackson": ("max_n", 3, _check_jackson),
    "u-formula": ("max_n", 4, _check_u_formula),
    "u-hat": ("max_n", 4, _check_u_hat),
    "hz": ("max_n", 6, _check_hz),
    "ledoux": ("max_n", 6, _check_ledoux),
    "phi-roundtrip": ("max_n", 3, _check_phi_roundtrip),
    "psi-fibers": ("max_n", 2, _check_psi_fibers),
    "gamma-roundtrip": ("max_edges", 4, _check_gamma_roundtrip),
    "planar-totals": ("max_edges", 5, _check_planar_totals),
    "algebraic-P": ("max_degree", 7, _check_algebraic_p),
    "q-pde": ("max_edges", 5, _check_q_pde),
    "rec-hP": ("max_total", 3, _check_rec_hp),
    "a-combination": ("max_edges", 5, _check_a_combination),
    "qfd": ("max_n", 6, _check_qfd),
}


def cmd_verify(args) -> int:
    bound_name, default, func = CHECKS[args.check]
    bound = args.bound if args.bound is not None else default
    start = time.monotonic()
    counterexample = func(bound, args.cache)
    elapsed = time.monotonic() - start
    report = {
        "schema": SCHEMA,
        "check": args.check,
        "bounds": {bound_name: bound},
        "verdict": "pass" if counterexample is None else "fail",
    }
    if counterexample is not None:
        report["counterexample"] = counterexample
    _emit(report)
    # timing is informational only and goes to stderr so that standard
    # output stays byte-deterministic
    print(f"{args.check}: {report['verdict']} in {elapsed:.2f}s",
          file=sys.stderr)
    return 0 if counterexample is None else 1


# ---------------------------------------------------------------------------
# fiber and bijection


def _psi_element_payload(p) -> dict:
    deg = {}
    for cyc, lab in zip(p.m.vertices(), p.vertex_labels):
        deg[str(lab)] = len(cyc)
    return {
        "map": _map_payload(p.m),
        "vertex_labels": list(p.vertex_labels),
        "edge_labels": list(p.edge_labels),
        "submap": sorted(p.submap),
        "face_labels": list(p.face_labels),
        "w": p.external_weight,
        "degrees_by_label": deg,
    }


def _upsilon_element_payload(t) -> dict:
    return {
        "map": _map_payload(t.m),
        "vertex_labels": list(t.vertex_labels),
        "edge_labels": list(t.edge_labels),
        "tree": sorted(t.tree),
        "orientation": sorted(t.orientation),
        "w": t.external_weight,
    }


def cmd_fiber(args) -> int:
    u = parse_gluing(args.map)
    if args.kind == "psi":
        fiber = psi_fiber(u)
        nn = 2 * u.gluing.n
        corner_deg = {}
        for c in range(nn):
            col = str(u.corner_color(c))
            corner_deg[col] = corner_deg.get(col, 0) + 1
        elements = []
        for p in fiber:
            payload = _psi_element_payload(p)
            payload["degree_certificate_ok"] = \
                payload["degrees_by_label"] == corner_deg
            elements.append(payload)
    else:
        elements = [_upsilon_element_payload(t) for t in upsilon_fiber(u)]
    _emit({
        "schema": SCHEMA,
        "kind": args.kind,
        "input": {"n": u.gluing.n, "pairs": [list(p) for p in u.gluing.pairs],
                  "twists": [int(t) for t in u.gluing.twists],
                  "colors": list(u.colors),
                  "labels": list(u.edge_labels)},
        "size": len(elements),
        "w": elements[0]["w"] if elements else 0,
        "elements": elements,
    })
    return 0


def cmd_bijection(args) -> int:
    if args.name == "phi":
        u = parse_gluing(args.input)
        if not u.gluing.orientable:
            raise SystemExit2("phi needs an orientable gluing")
        _emit({"schema": SCHEMA, "image": _upsilon_element_payload(phi(u))})
    elif args.name == "gamma":
        t = parse_tree(args.input)
        p = closure_gamma(t)
        _emit({"schema": SCHEMA,
               "image": dict(_map_payload(p.m), outer=p.outer)})
    else:  # delta
        p = parse_rotation(args.input)
        if not isinstance(p, PlaneMap):
            raise SystemExit2("delta needs an outer= field")
        _emit({"schema": SCHEMA, "image": _tree_payload(opening_delta(p))})
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unimaps",
        description="Exact counting and bijections for one-face maps")
    parser.add_argument("--cache", default=os.environ.get("UNIMAPS_CACHE"),
                        help="directory for persisted census tables "
                        "(default: $UNIMAPS_CACHE)")
    sub = parser.add_subparsers(dest="command", required=True)

    census = sub.add_parser("census", help="emit a counting table")
    census.add_argument("family", choices=[
        "unicellular-orientable", "unicellular-general", "planar-pqr",
        "tree-rooted"])
    census.add_argument("--n", type=int, default=None)
    census.add_argument("--max-edges", type=int, default=None)
    census.add_argument("--format", choices=["json", "csv"], default="json")
    census.add_argument("--threads", type=int, default=1)
    census.set_defaults(func=cmd_census)

    verify = sub.add_parser("verify", help="run a named identity check")
    verify.add_argument("check", choices=sorted(CHECKS))
    verify.add_argument("--bound", type=int, default=None,
                        help="check-specific size bound (defaults are "
                        "desk scale)")
    verify.set_defaults(func=cmd_verify)

    fiber = sub.add_parser("fiber", help="list the preimages of a map")
    fiber.add_argument("map", help="gluing literal, e.g. "
                       "'n=1; pairs=(0 1!)'")
    fiber.add_argument("--kind", choices=["psi", "upsilon"], default="psi")
    fiber.set_defaults(func=cmd_fiber)

    bijection = sub.add_parser("bijection",
                               help="apply a bijection to one object")
    bijection.add_argument("name", choices=["phi", "gamma", "delta"])
    bijection.add_argument("input")
    bijection.set_defaults(func=cmd_bijection)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
