"""Command line front end.

Subcommands: check (evaluate a formula on a system), compose (emit the
composed form of a product formula), verify-compose (differential check of
composed evaluation against the explicit product), gadget (machine
constructions), classes (synchronization class tables), product
(materialize the explicit product).  Verdicts map to exit codes 0 (true)
and 1 (false); parse and input errors exit 2; resource-cap errors exit 3.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
import time
from pathlib import Path

from .composer import (compose, eval_composed, profile_from_explicit,
                       verify_composition)
from .errors import (DEFAULT_CAPS, Caps, FormulaSyntaxError,
                     ResourceLimitError, SignatureError, SpecError)
from .evaluator import Evaluator
from .formulas import free_vars, to_text
from .lts import (ProductSpec, SyncConstraint, build_product, load_spec,
                  render_product_vertex, save_spec, sim_classes,
                  spec_to_json)
from .parser import parse_formula

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3


def load_caps(path):
    if path is None:
        return DEFAULT_CAPS
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    values = dataclasses.asdict(DEFAULT_CAPS)
    for key in doc:
        if key not in values:
            raise SpecError(f"unknown cap {key!r}")
        if not isinstance(doc[key], int) or doc[key] <= 0:
            raise SpecError(f"cap {key!r} must be a positive integer")
        values[key] = doc[key]
    return Caps(**values)


def _emit(args, doc, human):
    if args.json:
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(human)


def _parse_assignment(pairs):
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise SpecError(f"assignment {item!r} is not VAR=VERTEX")
        var, val = item.split("=", 1)
        out[var] = val
    return out


def _evaluation_graph(spec, caps):
    """The structure `check` evaluates on: the single component of a plain
    system file, or the explicit product of a multi-component spec."""
    if spec.n == 1 and not spec.constraint:
        return spec.components[0]
    return build_product(spec, caps)


def cmd_check(args, caps):
    spec = load_spec(args.system)
    formula = parse_formula(args.formula)
    graph = _evaluation_graph(spec, caps)
    assignment = _parse_assignment(args.assign)
    start = time.perf_counter()
    verdict = Evaluator(graph, caps).eval(formula, assignment)
    micros = int((time.perf_counter() - start) * 1e6)
    _emit(args, {"verdict": verdict, "micros": micros},
          f"{'true' if verdict else 'false'} ({micros} us)")
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_compose(args, caps):
    spec = load_spec(args.system)
    formula = parse_formula(args.formula)
    composed = compose(formula, spec, caps=caps)
    print(json.dumps(composed.to_json(), sort_keys=True, indent=2))
    return EXIT_TRUE


def _shrunk_counterexample(spec, formula, caps):
    """Greedy minimization: drop constraint tuples and edges while the
    composed-vs-direct disagreement persists."""
    def still_fails(candidate):
        try:
            report = verify_composition(candidate, formula, caps)
        except (SpecError, ResourceLimitError):
            return None
        return report if report.mismatches else None

    current = spec
    report = still_fails(current)
    if report is None:
        return spec, None
    changed = True
    while changed:
        changed = False
        for c in sorted(current.constraint):
            smaller = ProductSpec(
                current.components,
                SyncConstraint(current.constraint.tuples - {c}))
            attempt = still_fails(smaller)
            if attempt is not None:
                current, report, changed = smaller, attempt, True
                break
        if changed:
            continue
        for idx, g in enumerate(current.components):
            for lab in sorted(g.edges):
                for edge in sorted(g.edge_set(lab)):
                    edges = {a: set(p) for a, p in g.edges.items()}
                    edges[lab].discard(edge)
                    comps = list(current.components)
                    comps[idx] = dataclasses.replace(
                        g, edges={a: frozenset(p)
                                  for a, p in edges.items() if p})
                    smaller = ProductSpec(tuple(comps), current.constraint)
                    attempt = still_fails(smaller)
                    if attempt is not None:
                        current, report, changed = smaller, attempt, True
                        break
                if changed:
                    break
            if changed:
                break
    return current, report.mismatches[0]


def cmd_verify_compose(args, caps):
    spec = load_spec(args.system)
    formulas = [parse_formula(text) for text in args.formula]
    if args.random:
        from .randgen import random_sentence
        rng = random.Random(args.seed)
        formulas.extend(random_sentence(rng, spec)
                        for _ in range(args.random))
    if not formulas:
        raise SpecError("give formulas or --random N")
    product = build_product(spec, caps)
    profile = profile_from_explicit(spec, caps, product)
    agreed = 0
    failures = []
    for formula in formulas:
        composed = compose(formula, spec, profile, caps)
        report = verify_composition(spec, formula, caps, composed, product)
        if report.agrees:
            agreed += 1
        else:
            shrunk, witness = _shrunk_counterexample(spec, formula, caps)
            failures.append((formula, shrunk, witness))
    doc = {"checked": len(formulas), "agreed": agreed,
           "failures": [{
               "formula": to_text(f),
               "assignment": dict(w[0]) if w else None,
               "direct": w[1] if w else None,
               "composed": w[2] if w else None,
               "shrunk_spec": spec_to_json(s),
           } for f, s, w in failures]}
    lines = [f"{agreed}/{len(formulas)} agree"]
    for f, s, w in failures:
        lines.append(f"DISAGREE: {to_text(f)}")
        if w:
            lines.append(f"  at {w[0]} direct={w[1]} composed={w[2]}")
        lines.append(f"  shrunk spec: {json.dumps(spec_to_json(s))}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_TRUE if not failures else EXIT_FALSE


def cmd_classes(args, caps):
    spec = load_spec(args.system)
    product = build_product(spec, caps)
    tuples = sorted(spec.constraint)
    import itertools
    rows = []
    for size in range(1, len(tuples) + 1):
        for subset in itertools.combinations(tuples, size):
            info = sim_classes(spec, set(subset), caps, product)
            rows.append({
                "subset": [list(c) for c in sorted(subset)],
                "index": info.index,
                "enabled": len(info.enabled_vertices),
                "classes": {render_product_vertex(k): sorted(v)
                            for k, v in sorted(info.classes.items())},
            })
    if not rows:
        _emit(args, {"subsets": []}, "no constraint tuples")
        return EXIT_TRUE
    lines = []
    for row in rows:
        subset_text = ", ".join("(" + ",".join(c) + ")"
                                for c in row["subset"])
        lines.append(f"{{{subset_text}}}: index {row['index']}, "
                     f"{row['enabled']} enabled vertices")
        for key, members in row["classes"].items():
            lines.append(f"  {key}: {', '.join(members)}")
    _emit(args, {"subsets": rows}, "\n".join(lines))
    return EXIT_TRUE


def _as_single_spec(graph):
    """Wrap an explicit graph as a one-component spec for serialization."""
    renumbered = dataclasses.replace(
        graph, alphabet=dataclasses.replace(graph.alphabet, component_id=1))
    return ProductSpec((renumbered,), SyncConstraint(frozenset()))


def cmd_product(args, caps):
    spec = load_spec(args.system)
    product = build_product(spec, caps)
    flat = _as_single_spec(product)
    save_spec(flat, args.out)
    _emit(args, {"vertices": len(product.vertices),
                 "labels": sorted(product.labels), "out": args.out},
          f"wrote {args.out}: {len(product.vertices)} vertices, "
          f"{len(product.labels)} labels")
    return EXIT_TRUE


def _write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")


def _gadget_tm_gtrs(args, caps):
    from .gadgets import turing
    from .gadgets.trees import gtrs_to_json
    with open(args.spec, encoding="utf-8") as fh:
        machine = turing.machine_from_json(json.load(fh))
    depth = args.depth if args.depth is not None else 20
    out = Path(args.out)
    _write_json(out / "rewriting.json",
                gtrs_to_json(turing.machine_to_gtrs(machine)))
    graph, _, root = turing.bounded_product(machine, depth, caps=caps)
    save_spec(_as_single_spec(graph), out / "bounded_product.json")
    phi = turing.halting_formula(machine)
    _write_text(out / "halting_formula.txt", to_text(phi))
    verdict = Evaluator(graph, caps).eval(phi, {})
    halted, steps, _ = turing.run_machine(machine, depth)
    transcript = (f"bounded product: {len(graph.vertices)} vertices at "
                  f"depth {depth}\n"
                  f"halting formula: {'true' if verdict else 'false'}\n"
                  f"direct simulation: "
                  f"{'halts in ' + str(steps) + ' steps' if halted else 'no halt within ' + str(depth) + ' steps'}")
    _write_text(out / "transcript.txt", transcript)
    _emit(args, {"verdict": verdict, "simulator_halts": halted,
                 "vertices": len(graph.vertices), "root": root,
                 "out": str(out)}, transcript)
    return EXIT_TRUE if verdict else EXIT_FALSE


def _gadget_2pda_split(args, caps):
    from .gadgets import pda
    with open(args.spec, encoding="utf-8") as fh:
        machine = pda.machine_from_json(json.load(fh))
    height = args.depth if args.depth is not None else 12
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = pda.split_machine(machine, height)
    save_spec(spec, out / "split_spec.json")
    reach = pda.reach_formula(machine)
    _write_text(out / "pairing_reach.txt", to_text(reach))
    product = build_product(spec, caps)
    ev = Evaluator(product, caps)
    start = (machine.q0, (), ())
    reached = {v for v in sorted(product.vertices)
               if ev.eval(reach, {"x": pda.product_vertex_of(start),
                                  "y": v})}
    direct = {pda.product_vertex_of(c)
              for c in pda.simulate(machine, start, height)}
    agree = reached == direct
    transcript = (f"product: {len(product.vertices)} vertices, "
                  f"height bound {height}\n"
                  f"paired reachability from the initial configuration: "
                  f"{len(reached)} vertices\n"
                  f"direct simulation: {len(direct)} configurations\n"
                  f"agreement: {'yes' if agree else 'NO'}")
    _write_text(out / "transcript.txt", transcript)
    _emit(args, {"agreement": agree, "reached": len(reached),
                 "vertices": len(product.vertices), "out": str(out)},
          transcript)
    return EXIT_TRUE if agree else EXIT_FALSE


def _gadget_grid_arith(args, caps):
    from .gadgets import grid
    size = args.depth if args.depth is not None else 8
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_spec(grid.grid_spec(size), out / "grid_spec.json")
    named = {
        "plus": grid.plus_formula("x", "y", "z"),
        "square_trace": grid.square_trace_formula("z", "y"),
        "square": grid.square_formula("x", "y"),
    }
    for name, f in named.items():
        _write_text(out / f"{name}.txt", to_text(f))
        _write_text(out / f"{name}_grid.txt", to_text(grid.line_to_grid(f)))
    _emit(args, {"out": str(out), "formulas": sorted(named)},
          f"wrote grid spec and {len(named)} formula pairs to {out}")
    return EXIT_TRUE


def _gadget_translate(args, caps):
    from .gadgets import grid
    formula = parse_formula(args.formula)
    if args.direction == "line-to-grid":
        result = grid.line_to_grid(formula)
    else:
        result = grid.grid_to_line(formula)
    _emit(args, {"input": to_text(formula), "output": to_text(result),
                 "direction": args.direction}, to_text(result))
    return EXIT_TRUE


def cmd_gadget(args, caps):
    handlers = {
        "tm-gtrs": _gadget_tm_gtrs,
        "2pda-split": _gadget_2pda_split,
        "grid-arith": _gadget_grid_arith,
        "translate": _gadget_translate,
    }
    return handlers[args.kind](args, caps)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="syncmc",
        description="Model checking for synchronized products of labeled "
                    "transition systems.")
    parser.add_argument("--caps", metavar="FILE",
                        help="JSON file overriding resource caps")
    parser.add_argument("--json", action="store_true",
                        help="emit JSON instead of human-readable output")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for generated test suites")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula on a system")
    p.add_argument("system")
    p.add_argument("formula")
    p.add_argument("--assign", action="append", metavar="VAR=VERTEX")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("compose", help="emit the composed form")
    p.add_argument("system")
    p.add_argument("formula")
    p.set_defaults(run=cmd_compose)

    p = sub.add_parser("verify-compose",
                       help="composed vs direct evaluation")
    p.add_argument("system")
    p.add_argument("formula", nargs="*")
    p.add_argument("--random", type=int, default=0, metavar="N",
                   help="additionally verify N random sentences")
    p.set_defaults(run=cmd_verify_compose)

    p = sub.add_parser("gadget", help="machine constructions")
    p.add_argument("kind", choices=["tm-gtrs", "2pda-split", "grid-arith",
                                    "translate"])
    p.add_argument("spec", nargs="?",
                   help="machine spec file (tm-gtrs, 2pda-split)")
    p.add_argument("--formula", help="formula text (translate)")
    p.add_argument("--direction", choices=["line-to-grid", "grid-to-line"],
                   default="line-to-grid")
    p.add_argument("--depth", type=int,
                   help="expansion depth / height bound / grid size")
    p.add_argument("--out", default="gadget-out",
                   help="output directory for emitted artifacts")
    p.set_defaults(run=cmd_gadget)

    p = sub.add_parser("classes", help="synchronization class tables")
    p.add_argument("system")
    p.set_defaults(run=cmd_classes)

    p = sub.add_parser("product", help="materialize the explicit product")
    p.add_argument("system")
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_product)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gadget":
        if args.kind == "translate" and not args.formula:
            parser.error("translate needs --formula")
        if args.kind in ("tm-gtrs", "2pda-split") and not args.spec:
            parser.error(f"{args.kind} needs a machine spec file")
    try:
        caps = load_caps(args.caps)
        return args.run(args, caps)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (FormulaSyntaxError, SpecError, SignatureError,
            json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
