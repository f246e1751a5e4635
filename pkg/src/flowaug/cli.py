"""Command line front end: ``flowaug <command> ...``.

Exit codes: 0 success (including a "no" answer), 2 usage or input error, 3 guard exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from . import oracle, solvers
from .augment import augment_deterministic, augment_randomized
from .derandom import DerandError
from .graph_core import GraphError, Instance, ParseError, parse_instance, serialize_instance
from .harness import (KINDS, HarnessError, fixture_suite, generate, measure_det_family,
                      montecarlo)

EXIT_OK, EXIT_USAGE, EXIT_GUARD = 0, 2, 3
SOLVE_COMMANDS = ("solve-wstcut", "solve-bundled", "solve-chainsat", "solve-skew", "solve-wdfas", "solve-wdfvs")


class UsageError(ValueError):
    pass


def _load(path: str) -> Instance:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return parse_instance(text)


def _terminals(inst: Instance):
    if inst.s < 0 or inst.t < 0:
        raise UsageError("instance must declare both s and t")
    return inst.s, inst.t


def arc_weights(inst: Instance) -> dict:
    """Weights of finite arcs: 1 unless a single-arc bundle line gives one."""
    w = {i: 1 for i, a in inst.graph.arcs.items() if not a.inf}
    for weight, arcs in inst.bundles:
        if len(arcs) == 1 and arcs[0] in w:
            w[arcs[0]] = weight
    return w


def _budget(args, inst: Instance):
    k = args.k if args.k is not None else inst.k
    W = args.W if args.W is not None else inst.W
    if k is None:
        raise UsageError("budget k missing (use --k or a 'k' line)")
    if W is None:
        W = 2 ** 62
    return k, W


def _problem_input(problem: str, inst: Instance, k: int, W: int) -> dict:
    g = inst.graph
    if problem == "wstcut":
        s, t = _terminals(inst)
        return dict(graph=g, weights=arc_weights(inst), s=s, t=t, k=k, W=W)
    if problem in ("bundled", "chainsat"):
        s, t = _terminals(inst)
        return dict(graph=g, s=s, t=t, bundles=[list(b) for _, b in inst.bundles],
                    weights=[w for w, _ in inst.bundles], k=k, W=W)
    if problem == "skew":
        if not inst.pairs:
            raise UsageError("skew multicut needs at least one 'q' line")
        return dict(graph=g, pairs=list(inst.pairs), weights=arc_weights(inst), k=k, W=W)
    if problem == "dfas":
        return dict(graph=g, weights=arc_weights(inst), k=k, W=W)
    if problem == "dfvs":
        vw = {v: inst.vertex_weights.get(v, 1) for v in g.vertices}
        return dict(graph=g, weights=vw, k=k, W=W)
    raise UsageError(f"unknown problem {problem!r}; expected one of {', '.join(oracle.PROBLEMS)}")


def _solve(problem: str, kw: dict, ell=None):
    g = kw["graph"]
    if problem == "wstcut":
        return solvers.solve_weighted_st_cut(g, kw["weights"], kw["s"], kw["t"], kw["k"], kw["W"])
    if problem == "bundled":
        inst = solvers.BundledInstance(g, kw["s"], kw["t"], kw["k"], kw["bundles"], kw["weights"], kw["W"])
        return solvers.solve_bundled_cut(inst)
    if problem == "chainsat":
        ell = ell if ell is not None else max([len(b) for b in kw["bundles"]] + [1])
        return solvers.solve_chain_sat(g, kw["s"], kw["t"], ell, kw["bundles"], kw["weights"], kw["k"], kw["W"])
    if problem == "skew":
        return solvers.solve_skew_multicut(solvers.SkewInstance(g, kw["pairs"], kw["weights"], kw["k"], kw["W"]))
    if problem == "dfas":
        return solvers.solve_wdfas(g, kw["weights"], kw["k"], kw["W"])
    return solvers.solve_wdfvs(g, kw["weights"], kw["k"], kw["W"])


def certify(problem: str, kw: dict, ans) -> bool:
    """Re-check a certificate with the oracle's own reachability code."""
    g = kw["graph"]
    if problem == "wstcut":
        Z = ans.arcs
        return (len(Z) <= kw["k"] and sum(kw["weights"][i] for i in Z) <= kw["W"]
                and kw["t"] not in oracle._bfs(g, kw["s"], frozenset(Z)))
    if problem in ("bundled", "chainsat"):
        picked = ans.bundles
        Z = frozenset(i for b in picked for i in kw["bundles"][b])
        return (len(picked) <= kw["k"] and sum(kw["weights"][b] for b in picked) <= kw["W"]
                and ans.arcs <= Z and kw["t"] not in oracle._bfs(g, kw["s"], frozenset(ans.arcs)))
    if problem == "skew":
        Z = ans.arcs
        return (len(Z) <= kw["k"] and sum(kw["weights"][i] for i in Z) <= kw["W"]
                and oracle._skew_ok(g, kw["pairs"], frozenset(Z)))
    if problem == "dfas":
        Z = ans.arcs
        rest = [(a.tail, a.head) for i, a in g.arcs.items() if i not in Z]
        return (len(Z) <= kw["k"] and sum(kw["weights"][i] for i in Z) <= kw["W"]
                and oracle._acyclic(g.vertices, rest))
    X = ans.arcs
    keep = set(g.vertices) - set(X)
    rest = [(a.tail, a.head) for a in g.arcs.values() if a.tail in keep and a.head in keep]
    return (len(X) <= kw["k"] and sum(kw["weights"][v] for v in X) <= kw["W"]
            and oracle._acyclic(keep, rest))


def _emit_answer(args, problem, ans, kw):
    if ans == solvers.NO:
        out = {"problem": problem, "answer": "no"}
        text = "no"
    else:
        out = {"problem": problem, "answer": "yes", "weight": ans.weight, "certificate": sorted(ans.arcs)}
        text = f"yes weight={ans.weight} certificate={' '.join(map(str, sorted(ans.arcs)))}"
        if ans.bundles:
            out["bundles"] = sorted(ans.bundles)
            text += f" bundles={' '.join(map(str, sorted(ans.bundles)))}"
        if getattr(args, "certify", False):
            ok = certify(problem, kw, ans)
            out["certified"] = ok
            text += " certified" if ok else " CERTIFICATE-INVALID"
            if not ok:
                raise AssertionError("certificate failed independent validation")
    print(json.dumps(out, sort_keys=True) if args.json else text)


# ------------------------------------------------------------------- commands
def cmd_augment(args) -> int:
    inst = _load(args.instance)
    s, t = _terminals(inst)
    k = args.k if args.k is not None else inst.k
    if k is None:
        raise UsageError("budget k missing (use --k or a 'k' line)")
    if args.det:
        fam = augment_deterministic(inst.graph, s, t, k, args.kappa)
    else:
        rnd = random.Random(args.seed)
        fam = [augment_randomized(inst.graph, s, t, k, args.kappa, rng=rnd) for _ in range(args.trials)]
    rows = [{"A": sorted(map(list, p.A)), "flow": [list(f) for f in p.flow]} for p in fam]
    if args.json:
        print(json.dumps(rows, sort_keys=True))
    else:
        for r in rows:
            print("A=" + " ".join(f"{u}->{v}" for u, v in r["A"]) + " | flow=" +
                  " ; ".join(" ".join(map(str, f)) for f in r["flow"]))
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = {"wdfas": "dfas", "wdfvs": "dfvs"}.get(args.command[6:], args.command[6:])
    inst = _load(args.instance)
    k, W = _budget(args, inst)
    kw = _problem_input(problem, inst, k, W)
    ans = _solve(problem, kw, getattr(args, "ell", None))
    _emit_answer(args, problem, ans, kw)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    k, W = _budget(args, inst)
    kw = _problem_input(args.problem, inst, k, W)
    res = oracle.brute_solver(args.problem, **kw)
    if res == oracle.NO:
        print(json.dumps({"problem": args.problem, "answer": "no"}) if args.json else "no")
    else:
        w, cert = res
        if args.json:
            print(json.dumps({"problem": args.problem, "answer": "yes", "weight": w,
                              "certificate": sorted(cert)}, sort_keys=True))
        else:
            print(f"yes weight={w} certificate={' '.join(map(str, sorted(cert)))}")
    return EXIT_OK


def _params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} must look like key=value")
        key, val = item.split("=", 1)
        out[key] = val
    return out


def cmd_gen(args) -> int:
    inst = generate(args.kind, _params(args.param), args.seed)
    text = serialize_instance(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    inst = _load(args.instance)
    s, t = _terminals(inst)
    k = args.k if args.k is not None else inst.k
    if k is None:
        raise UsageError("budget k missing (use --k or a 'k' line)")
    rep = montecarlo(inst.graph, s, t, k, args.kappa, args.trials, args.seed)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rep.to_csv())
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(rep.to_json())
    if not args.csv and not args.json_out:
        sys.stdout.write(rep.to_csv())
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = fixture_suite(with_ladder=not args.no_ladder)
    text = measure_det_family(suite, range(1, args.k_max + 1), timing=not args.no_timing,
                              time_limit=args.time_limit)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flowaug", description="Flow-augmentation toolkit for directed cut problems.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("augment", help="run randomized or deterministic flow-augmentation")
    a.add_argument("instance")
    a.add_argument("--k", type=int)
    a.add_argument("--kappa", type=int, default=0)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--det", action="store_true", help="print the whole deterministic family")
    a.add_argument("--trials", type=int, default=1)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_augment)

    for name in SOLVE_COMMANDS:
        c = sub.add_parser(name, help=f"solve {name[6:]} on an instance file")
        c.add_argument("instance")
        c.add_argument("--k", type=int)
        c.add_argument("--W", type=int)
        c.add_argument("--json", action="store_true")
        c.add_argument("--certify", action="store_true", help="re-validate the certificate independently")
        if name == "solve-chainsat":
            c.add_argument("--ell", type=int, help="maximum chain length (default: longest chain)")
        c.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force answer for a problem")
    o.add_argument("problem", choices=oracle.PROBLEMS)
    o.add_argument("instance")
    o.add_argument("--k", type=int)
    o.add_argument("--W", type=int)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--param", "-p", action="append", metavar="KEY=VALUE")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("montecarlo", help="per-cut coverage frequencies of randomized augmentation")
    m.add_argument("instance")
    m.add_argument("--k", type=int)
    m.add_argument("--kappa", type=int, default=0)
    m.add_argument("--trials", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--csv")
    m.add_argument("--json", dest="json_out")
    m.set_defaults(func=cmd_montecarlo)

    b = sub.add_parser("bench", help="deterministic family sizes over the fixture suite")
    b.add_argument("--k-max", type=int, default=3)
    b.add_argument("--out")
    b.add_argument("--no-ladder", action="store_true")
    b.add_argument("--no-timing", action="store_true")
    b.add_argument("--time-limit", type=float, help="seconds per (instance, k) cell before recording a timeout")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except oracle.GuardExceeded as e:
        print(f"flowaug: guard exceeded: {e}", file=sys.stderr)
        return EXIT_GUARD
    except ParseError as e:
        print(f"flowaug: parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, HarnessError, GraphError, DerandError, solvers.SolverError) as e:
        print(f"flowaug: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
