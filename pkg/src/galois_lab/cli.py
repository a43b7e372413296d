"""Command-line driver: ``galois-lab <subcommand> [args] [options]``.

Exit codes: 0 success, 2 malformed input or usage, 3 domain error, 4 stage
failure. ``--format machine`` prints one JSON record per line (see
`galois_lab.serialize`). An argument ``@path`` is replaced by the lines of
the file at path.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from galois_lab.errors import DomainError, ParseError, StageFailure
from galois_lab.exact.poly import QPoly, factor_q, format_rational
from galois_lab.expressions import parse_algebraic, parse_field_poly, parse_qpoly
from galois_lab.fields import (
    NumberField,
    conjugate_list,
    factor_over,
    membership,
    parse_field,
    relative_minpoly,
    tower_extend,
)
from galois_lab.haar import measure, parse_clopen, tower_measures
from galois_lab.profinite import (
    automorphisms,
    certify_witness,
    graph_truncation,
    intersection_witness,
    orbit_of_tuple,
    strong_graph_truncation,
    tree_build,
)
from galois_lab.qbar import qbar_index, qbar_key
from galois_lab.randomness import (
    MuTest,
    build_random_automorphism,
    mu_test_validate,
    non_randomness_witness,
    verify_construction,
)
from galois_lab.serialize import dumps, encode
from galois_lab.towers import parse_tower


class _Out:
    def __init__(self, args, stream):
        self.machine = args.format == "machine"
        self.approx = args.approx
        self.stream = stream

    def emit(self, kind, human, **obj):
        if self.machine:
            self.stream.write(dumps(encode(kind, **obj)) + "\n")
        else:
            for line in human if isinstance(human, list) else [human]:
                self.stream.write(line + "\n")


class _Config:
    def __init__(self, path):
        self.data = {}
        if path:
            try:
                with open(path, encoding="utf-8") as fh:
                    self.data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ParseError(f"cannot read config {path!r}: {exc}") from exc
            if not isinstance(self.data, dict):
                raise ParseError("config must be a JSON object")

    def depth(self, args, default):
        if args.depth is not None:
            return args.depth
        return int(self.data.get("depth", default))

    def check(self, K: NumberField) -> NumberField:
        cap = self.data.get("max_degree")
        if cap is not None and K.degree > int(cap):
            raise DomainError(f"field degree {K.degree} exceeds the configured cap {cap}")
        return K


# -- human rendering -----------------------------------------------------------------
def _num(a, approx=False) -> str:
    if a.is_rational():
        return format_rational(a.as_rational())
    text = f"rootof({a.minpoly.to_text()}, {a.position})"
    if approx:
        z = a.approx()
        text += f"  ~ {z.real:.10g}" + (f"{z.imag:+.10g}i" if z.imag else "")
    return text


def _field(K: NumberField, approx=False) -> str:
    if K.is_rationals():
        return "Q"
    return f"Q(a), a = {_num(K.generator, approx)}, degree {K.degree}"


def _coords(coords, var="a") -> str:
    return QPoly(list(coords)).pretty(var)


def _field_poly(P) -> str:
    terms = []
    for k in range(P.degree, -1, -1):
        c = QPoly(list(P.coefficients[k].coordinates))
        if c.is_zero():
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        body = c.pretty("a")
        if mono:
            if body == "1":
                body = mono
            elif body == "-1":
                body = "-" + mono
            else:
                body = f"({body})*{mono}"
        terms.append(body)
    if not terms:
        return "0"
    text = terms[0]
    for t in terms[1:]:
        text += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return text


# -- subcommands -----------------------------------------------------------------------
def _over(args, cfg) -> NumberField:
    return cfg.check(parse_field(args.over)) if args.over else NumberField.rationals()


def cmd_factor(args, cfg, out):
    K = _over(args, cfg)
    if K.is_rationals():
        for f, e in factor_q(parse_qpoly(args.poly)):
            suffix = "" if e == 1 else f"  (multiplicity {e})"
            out.emit("factor", f.pretty() + suffix, poly=f, multiplicity=e)
    else:
        if not out.machine:
            out.stream.write(f"over {_field(K, out.approx)}\n")
        for f, e in factor_over(parse_field_poly(args.poly, K), K):
            suffix = "" if e == 1 else f"  (multiplicity {e})"
            out.emit("factor", _field_poly(f) + suffix, poly=f, multiplicity=e)


def cmd_minpoly(args, cfg, out):
    x = parse_algebraic(args.expr)
    K = _over(args, cfg)
    if K.is_rationals():
        out.emit("algebraic", [x.minpoly.pretty(), _num(x, out.approx)], value=x)
    else:
        f = relative_minpoly(x, K)
        out.emit("factor", _field_poly(f), poly=f, multiplicity=1)


def cmd_arith(args, cfg, out):
    a = parse_algebraic(args.a)
    unary = {"neg": lambda: -a, "inv": lambda: _inv(a)}
    binary = {"add": lambda b: a + b, "sub": lambda b: a - b, "mul": lambda b: a * b, "div": lambda b: a * _inv(b)}
    if args.op in unary:
        if args.b is not None:
            raise ParseError(f"{args.op} takes one operand")
        r = unary[args.op]()
    else:
        if args.b is None:
            raise ParseError(f"{args.op} takes two operands")
        r = binary[args.op](parse_algebraic(args.b))
    out.emit("algebraic", _num(r, out.approx), value=r)


def _inv(a):
    if a.is_zero():
        raise DomainError("zero has no inverse")
    return a ** -1


def cmd_conjugates(args, cfg, out):
    x = parse_algebraic(args.expr)
    for c in conjugate_list(x, _over(args, cfg)):
        out.emit("algebraic", _num(c, out.approx), value=c)


def cmd_primitive(args, cfg, out):
    K = _over(args, cfg)
    xs = [parse_algebraic(e) for e in args.exprs]
    F = K
    for x in xs:
        F = cfg.check(tower_extend(F, x))
    out.emit("field", _field(F, out.approx), field=F)
    for text, x in zip(args.exprs, xs):
        h = membership(x, F)
        out.emit("membership", f"{text} = {_coords(h.coordinates)}", field=F, element=x, coordinates=h.coordinates)


def cmd_membership(args, cfg, out):
    K = _over(args, cfg)
    x = parse_algebraic(args.expr)
    h = membership(x, K)
    coords = None if h is None else h.coordinates
    human = "not in the field" if h is None else f"in the field: {_coords(coords)}"
    out.emit("membership", human, field=K, element=x, coordinates=coords)


def cmd_galois_group(args, cfg, out):
    text = args.field or args.over
    if not text:
        raise ParseError("galois-group needs a field")
    K = cfg.check(parse_field(text))
    G = automorphisms(K)
    human = [f"{_field(K, out.approx)}", f"order {G.order}, {'abelian' if G.is_abelian() else 'non-abelian'}"]
    for i, e in enumerate(G.elements):
        human.append(f"s{i}: a -> {_coords(membership(e.image, K).coordinates)}")
    human.append("table (row i, column j: s_i then s_j)")
    human.extend(" ".join(str(v) for v in row) for row in G.table)
    out.emit("group", human, group=G)


def cmd_tree(args, cfg, out):
    K = _over(args, cfg)
    depth = cfg.depth(args, 2)
    rule = parse_tower(args.tower) if args.tower else None
    tree = tree_build(K, depth, rule)
    for F in tree.tower:
        cfg.check(F)
    for lv, nodes in enumerate(tree.levels):
        F = tree.tower[lv]
        if not out.machine:
            out.stream.write(f"level {lv}: {len(nodes)} nodes over {_field(F, out.approx)}\n")
        for k, nd in enumerate(nodes):
            img = _coords(membership(nd.embedding.image, F).coordinates)
            parent = "-" if nd.parent is None else str(nd.parent)
            out.emit(
                "node", f"  [{lv}.{k}] parent {parent}: a -> {img}",
                level=lv, index=k, parent=nd.parent, embedding=nd.embedding,
            )


def cmd_orbit(args, cfg, out):
    K = _over(args, cfg)
    xs = [parse_algebraic(e) for e in args.exprs]
    for t in sorted(orbit_of_tuple(K, xs), key=lambda t: [qbar_key(a) for a in t]):
        out.emit("tuple", "(" + ", ".join(_num(a, out.approx) for a in t) + ")", elements=list(t))


def cmd_graph(args, cfg, out):
    K = _over(args, cfg)
    depth = cfg.depth(args, 5)
    if args.strong:
        rows = sorted(strong_graph_truncation(K, depth), key=lambda r: qbar_key(r[0]))
        for r in rows:
            idx = [qbar_index(a) for a in r]
            out.emit("row", " ".join(map(str, idx)), indices=idx)
    else:
        pairs = sorted(graph_truncation(K, depth), key=lambda p: (qbar_key(p[0]), qbar_key(p[1])))
        for a, b in pairs:
            idx = [qbar_index(a), qbar_index(b)]
            out.emit("pair", f"{idx[0]} -> {idx[1]}", indices=idx)


def cmd_measure(args, cfg, out):
    s = parse_clopen(args.set)
    K = cfg.check(parse_field(args.over)) if args.over else None
    mu = measure(s, K)
    out.emit("measure", format_rational(mu), value=mu, set=s)


def cmd_tower_measures(args, cfg, out):
    t = parse_tower(args.tower)
    for j, mu in enumerate(tower_measures(t, cfg.depth(args, 3)), start=1):
        out.emit("measure", f"stage {j}: {format_rational(mu)}", value=mu, stage=j)


def cmd_mu_test(args, cfg, out):
    i = args.index
    test = MuTest([parse_tower(t) for t in args.towers]) if args.towers else MuTest.prime_sqrt_family(i + 1)
    if not 0 <= i < len(test.components):
        raise DomainError(f"component {i} does not exist")
    depth = cfg.depth(args, test.component(i).length or i + 1)
    mu = tower_measures(test.component(i), depth)[-1]
    bound = Fraction(1, 2 ** i)
    ok = mu_test_validate(test, i, depth)
    verdict = "valid" if ok else "not valid"
    out.emit(
        "mu-test", f"component {i}: measure {format_rational(mu)} vs bound {format_rational(bound)}: {verdict}",
        index=i, depth=depth, valid=ok, measure=mu, bound=bound,
    )


def cmd_intersect(args, cfg, out):
    t1, t2 = parse_tower(args.first), parse_tower(args.second)
    depth = cfg.depth(args, 2)
    search = parse_tower(args.search) if args.search else None
    p = intersection_witness(t1, t2, depth, search)
    if p is None:
        out.emit("witness", "no witness within depth", prefix=None)
        return
    x, img = p.moved
    human = [f"witness at depth {p.depth}: {_num(x, out.approx)} -> {_num(img, out.approx)}"]
    human.append("certified" if certify_witness(p, t1, t2, depth) else "certification FAILED")
    out.emit("witness", human, prefix=p)


def cmd_witness(args, cfg, out):
    ft = parse_tower(args.field_tower)
    catalog = [parse_tower(t) for t in args.catalog]
    depth = cfg.depth(args, 2)
    w = non_randomness_witness(ft, catalog, depth, args.field_depth)
    if w is None:
        out.emit("non-randomness", "no catalog entry is contained within depth", witness=None)
        return
    human = [f"catalog entry {w.catalog_index} ({w.entry.name}) is contained"]
    human += [f"  {_num(g, out.approx)} in stage {j}" for g, j in w.containments]
    out.emit("non-randomness", human, witness=w)


def cmd_construct_random(args, cfg, out):
    avoid = [parse_tower(t) for t in args.avoid]
    p = build_random_automorphism(avoid, args.stages, args.policy, args.seed)
    for rec in p.log:
        verb = "moved" if rec.moved else "fixed"
        tag = "" if rec.avoid_index is None else f" (avoid {rec.avoid_index})"
        human = f"stage {rec.stage}: {verb} {_num(rec.element, out.approx)} -> {_num(rec.image, out.approx)}"
        out.emit("stage", f"{human}{tag}, degree {rec.degree}", record=rec)
    out.emit("automorphism", f"final field degree {p.domain.degree}", embedding=p.action)
    if not out.machine:
        checks = verify_construction(p, avoid)
        out.stream.write("verification: " + ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()) + "\n")


# -- argument grammar --------------------------------------------------------------------
def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--over", metavar="FIELD", help="base field: Q, Q(sqrt(2)), Q(a, b) or a {minpoly, box} record")
    common.add_argument("--depth", type=int, metavar="N")
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--approx", action="store_true", help="append decimal approximations to human output")
    common.add_argument("--config", metavar="PATH", help="JSON file with defaults: depth, max_degree")

    top = argparse.ArgumentParser(
        prog="galois-lab",
        description="Exact algebraic numbers, number fields and Galois-group measures.",
        fromfile_prefix_chars="@",
    )
    sub = top.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, fromfile_prefix_chars="@")
        p.set_defaults(func=func)
        return p

    add("factor", cmd_factor, "factor a polynomial over Q or --over a field").add_argument("poly")
    add("minpoly", cmd_minpoly, "minimal polynomial of an algebraic number").add_argument("expr")
    p = add("arith", cmd_arith, "arithmetic on algebraic numbers")
    p.add_argument("op", choices=("add", "sub", "mul", "div", "neg", "inv"))
    p.add_argument("a")
    p.add_argument("b", nargs="?")
    add("conjugates", cmd_conjugates, "conjugates over Q or --over a field").add_argument("expr")
    add("primitive", cmd_primitive, "primitive element of a generated field").add_argument("exprs", nargs="+")
    add("membership", cmd_membership, "coordinates of a number in --over FIELD").add_argument("expr")
    add("galois-group", cmd_galois_group, "automorphism group of a Galois field").add_argument("field", nargs="?")
    add("tree", cmd_tree, "automorphism tree").add_argument("--tower", help="tower descriptor for the levels")
    add("orbit", cmd_orbit, "orbit of a tuple under automorphisms fixing a field").add_argument("exprs", nargs="+")
    add("graph", cmd_graph, "graph truncation over the first N enumerated numbers").add_argument(
        "--strong", action="store_true", help="rows of all images instead of pairs"
    )
    add("measure", cmd_measure, "Haar measure of a clopen set").add_argument("set")
    add("tower-measures", cmd_tower_measures, "measures of a tower's stage groups").add_argument("tower")
    p = add("mu-test", cmd_mu_test, "check one component of a measure test")
    p.add_argument("towers", nargs="*", help="components (default: prime-sqrt family)")
    p.add_argument("--index", type=int, default=0)
    p = add("intersect", cmd_intersect, "common nontrivial witness for two towers")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--search", help="tower descriptor driving the search tree")
    p = add("witness", cmd_witness, "non-randomness witness against a catalog")
    p.add_argument("field_tower")
    p.add_argument("--catalog", nargs="+", required=True)
    p.add_argument("--field-depth", type=int)
    p = add("construct-random", cmd_construct_random, "staged random-automorphism construction")
    p.add_argument("--avoid", nargs="*", default=[])
    p.add_argument("--stages", type=int, default=3)
    p.add_argument("--policy", choices=("least", "random"), default="least")
    p.add_argument("--seed", type=int)
    return top


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    old_err = sys.stderr
    sys.stderr = stderr
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    finally:
        sys.stderr = old_err
    try:
        cfg = _Config(args.config)
        args.func(args, cfg, _Out(args, stdout))
    except StageFailure as exc:
        stderr.write(f"stage failure: {exc}\n")
        return 4
    except ParseError as exc:
        stderr.write(f"malformed input: {exc}\n")
        return 2
    except (DomainError, ZeroDivisionError) as exc:
        stderr.write(f"domain error: {exc}\n")
        return 3
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
