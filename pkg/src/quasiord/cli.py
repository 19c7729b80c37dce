"""Reporting front end.

Every run emits one JSON document on stdout (and to --out when given):
version stamp, configuration echo, per-check results with witnesses in
element syntax, and an overall status.  Human-oriented progress lines go
to stderr so that stdout stays byte-identical across runs with the same
configuration.  DOT graphs are written as separate files.

Exit codes: 0 success, 1 a mathematical check failed (witness in the
report), 2 usage or configuration error.
"""

import argparse
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, acceptance, poset, predicates, rings, verifier
from .catalog import (ORDERING, VALUATION, ClassifyError, catalog, classify,
                      resolve_entry)


class UsageError(Exception):
    pass


SHARED_KEYS = ("ring", "bound", "max_exp", "max_terms", "coeffs", "samples",
               "seed", "out", "dot", "prime_bound")


def _say(msg):
    print(msg, file=sys.stderr)


def _merge_config(args):
    """CLI flags over config file over defaults."""
    cfg = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}")
        if not isinstance(data, dict):
            raise UsageError(f"config {path} must hold a JSON object")
        unknown = set(data) - set(SHARED_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key in SHARED_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if isinstance(cfg.get("coeffs"), list):
        cfg["coeffs"] = ",".join(str(c) for c in cfg["coeffs"])
    return cfg


def _ring(cfg):
    try:
        return rings.ring_by_id(cfg.get("ring", "Z"))
    except KeyError as exc:
        raise UsageError(exc.args[0])


def _resolve(qo_id, prime_bound):
    try:
        return resolve_entry(qo_id, prime_bound=max(prime_bound, 23))
    except KeyError as exc:
        raise UsageError(exc.args[0])


def _needed_magnitude(ids):
    """Least integer bound that can even represent the named members."""
    need = 0
    for i in ids:
        tail = i.rsplit(":", 1)[-1]
        if i.startswith("Z:") and tail.isdigit():
            need = max(need, int(tail))
    return need


def _bounds(ring, cfg, min_b=0):
    """An explicitly configured bound is used verbatim; the default is
    raised to min_b so the named members stay distinguishable."""
    base = rings.default_bounds(ring)
    coeffs = base.C
    if cfg.get("coeffs"):
        try:
            coeffs = tuple(Fraction(tok) for tok
                           in cfg["coeffs"].split(",") if tok)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --coeffs value: {exc}")
        if not coeffs:
            raise UsageError("--coeffs needs at least one value")
    try:
        return rings.UniverseBounds(
            B=int(cfg["bound"]) if "bound" in cfg else max(base.B, min_b),
            D=int(cfg.get("max_exp", base.D)),
            T=int(cfg.get("max_terms", base.T)),
            C=coeffs,
            S=int(cfg.get("samples", 0)),
            seed=int(cfg.get("seed", 0)))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad universe bounds: {exc}")


def _universe(ring, cfg, min_b=0):
    return rings.enumerate_universe(ring, _bounds(ring, cfg, min_b))


def _report(command, cfg, status, payload):
    doc = {"version": __version__, "command": command,
           "config": {k: cfg[k] for k in sorted(cfg)}, "status": status}
    doc.update(payload)
    return doc


def _emit(doc, cfg):
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text)
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text, encoding="utf-8")


def _write_dot(path, source):
    Path(path).write_text(source, encoding="utf-8")
    _say(f"wrote {path}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_catalog(args, cfg):
    ring = _ring(cfg)
    pb = int(cfg.get("prime_bound", 5))
    rows = []
    for e in catalog(ring, prime_bound=pb):
        rows.append({"id": e.id, "kind": e.qo.declared_kind,
                     "support": e.qo.declared_support.name,
                     "description": e.description,
                     "coarsening_facts": e.facts})
        _say(f"{e.id:<14} {e.qo.declared_kind:<10} "
             f"support {e.qo.declared_support.name}")
    _emit(_report("catalog", cfg, "ok", {"entries": rows}), cfg)
    return 0


def _mutate(qo, token, universe):
    if token == "swap":
        return verifier.swap_mutant(qo)
    if token == "trans-break":
        return verifier.transitivity_break_mutant(qo, universe)
    if token == "neg-unit":
        if qo.declared_kind != ORDERING:
            raise UsageError("--mutant neg-unit needs an ordering-kind base")
        return verifier.neg_unit_mutant(qo)
    raise UsageError(f"unknown mutant {token!r}")


def _check_one(entry, universe, mutant):
    qo = entry.qo if mutant is None else _mutate(entry.qo, mutant, universe)
    res = {"qo": qo.id, "declared_kind": entry.qo.declared_kind}
    passed = True

    qr = verifier.check_qr_axioms(qo, universe)
    res["axioms"] = qr.to_dict()
    passed &= qr.passed
    for o in qr.failures:
        ok = verifier.recheck_witness(qo, o.axiom, o.witness)
        res.setdefault("witnesses_rechecked", {})[o.axiom] = ok
        _say(f"{qo.id}: {o.axiom} fails with {o.witness}")

    try:
        kind = classify(qo)
    except ClassifyError as exc:
        kind = None
        res["classified"] = f"error: {exc}"
    else:
        res["classified"] = kind
    if kind != entry.qo.declared_kind:
        passed = False

    try:
        res["derived"] = verifier.check_derived_lemmas(qo, universe).to_dict()
        passed &= res["derived"]["passed"]
    except (ClassifyError, verifier.EngineError) as exc:
        res["derived"] = {"error": str(exc)}
        passed = False

    if entry.qo.declared_kind == ORDERING:
        try:
            rep = verifier.check_ordering_axioms(qo, universe)
            res["ordering"] = rep.to_dict()
            passed &= rep.passed
        except (verifier.KindPreconditionError,
                verifier.EngineError) as exc:
            res["ordering"] = {"error": str(exc)}
            passed = False
    elif kind == VALUATION:
        try:
            vt = verifier.extract_valuation(qo, universe)
            res["valuation"] = vt.to_dict(qo.ring.show)
        except verifier.ExtractionError as exc:
            res["valuation"] = {"error": {
                "stage": exc.args[0], "message": exc.args[1],
                "witness": exc.args[2] if len(exc.args) > 2 else None}}
            passed = False
    res["passed"] = passed
    _say(f"{qo.id}: {'PASS' if passed else 'FAIL'}")
    return res, passed


def cmd_check(args, cfg):
    pb = int(cfg.get("prime_bound", 5))
    if args.ids:
        targets = [_resolve(i, pb) for i in args.ids]
    else:
        targets = list(catalog(_ring(cfg), prime_bound=pb))
    results = []
    all_ok = True
    universes = {}
    need = _needed_magnitude([e.id for e in targets])
    for e in targets:
        ring = e.qo.ring
        if ring.alias not in universes:
            universes[ring.alias] = _universe(ring, cfg, min_b=need)
        res, ok = _check_one(e, universes[ring.alias], args.mutant)
        results.append(res)
        all_ok &= ok
    status = "ok" if all_ok else "fail"
    _emit(_report("check", cfg, status, {"checks": results}), cfg)
    return 0 if all_ok else 1


def cmd_compare(args, cfg):
    pb = int(cfg.get("prime_bound", 5))
    ep, eq = _resolve(args.p, pb), _resolve(args.q, pb)
    if ep.qo.ring is not eq.qo.ring:
        raise UsageError(f"{ep.id} and {eq.id} live on different rings")
    uni = _universe(ep.qo.ring, cfg,
                    min_b=_needed_magnitude([ep.id, eq.id]))
    dec = poset.compare_entries(ep, eq, uni)
    payload = {"decision": dec.to_dict()}
    if dec.status == poset.REFUTED:
        x = uni.ring.parse(dec.witness["x"])
        y = uni.ring.parse(dec.witness["y"])
        ok = poset.validate_coarsening_witness(ep.qo, eq.qo, x, y)
        payload["witness_rechecked"] = ok
        if not ok:
            raise verifier.EngineError(
                f"witness for {ep.id} <= {eq.id} fails its recheck")
        _say(f"{ep.id} <= {eq.id}: Refuted by (x={dec.witness['x']}, "
             f"y={dec.witness['y']})")
    else:
        _say(f"{ep.id} <= {eq.id}: {dec.status} "
             f"({dec.pairs_checked} pairs)")
    _emit(_report("compare", cfg, "ok", payload), cfg)
    return 0


def _support_group(ring, cfg, token):
    pb = int(cfg.get("prime_bound", 5))
    ideals = rings.shipped_ideals(ring, prime_bound=pb)
    if token not in ideals:
        raise UsageError(f"unknown support {token!r} for {ring.alias}; "
                         f"one of {sorted(ideals)}")
    ideal = ideals[token]
    group = [e for e in catalog(ring, prime_bound=pb)
             if e.qo.declared_support == ideal]
    if not group:
        raise UsageError(f"no catalog members with support {ideal.name}")
    return group, ideal, pb


def cmd_tree(args, cfg):
    ring = _ring(cfg)
    group, ideal, pb = _support_group(ring, cfg, args.support)
    uni = _universe(ring, cfg, min_b=pb if ring is rings.INTEGERS else 0)
    cposet = poset.build_poset(group, uni)
    tree = poset.check_tree(group, uni, poset=cposet)
    verdicts = predicates.predicate_verdicts(group, uni)
    kap = predicates.kaplansky_check(group, uni, cposet=cposet)
    dep = predicates.dependency_classes(group, uni, cposet=cposet)
    sub = predicates.subtree_check(group, uni, verdicts=verdicts)
    notes = {e.id: e.metadata["figure_note"] for e in group
             if "figure_note" in e.metadata}
    dot = poset.poset_dot(cposet,
                          title=f"{ring.alias} support {ideal.name}")
    if cfg.get("dot"):
        _write_dot(cfg["dot"], dot)
    ok = (tree.ok and kap["K1"] == "Pass" and kap["K2"] == "Pass"
          and sub["ok"])
    payload = {"tree": tree.to_dict(), "poset": cposet.to_dict(),
               "kaplansky": kap, "dependency": dep.to_dict(),
               "subtree": sub, "notes": notes, "dot": dot}
    _say(f"support {ideal.name}: root {tree.root}, "
         f"{len(tree.members)} members, "
         f"K1 {kap['K1']} K2 {kap['K2']}")
    for v in tree.violations:
        _say(f"violation: {v}")
    for i, note in notes.items():
        _say(f"note on {i}: {note}")
    _emit(_report("tree", cfg, "ok" if ok else "fail", payload), cfg)
    return 0 if ok else 1


def _dot_stem(path):
    p = Path(path)
    return p.with_suffix("") if p.suffix == ".dot" else p


def cmd_forest(args, cfg):
    ring = _ring(cfg)
    pb = int(cfg.get("prime_bound", 5))
    entries = catalog(ring, prime_bound=pb)
    uni = _universe(ring, cfg, min_b=pb if ring is rings.INTEGERS else 0)
    forest = poset.forest_partition(entries, uni)
    payload = forest.to_dict()
    if args.relation != "le":
        # the partition relation has no cross-support pairs by definition;
        # the full relation is reported only on request
        payload.pop("cross_support")
    payload["relation"] = args.relation or "partition"

    token_of = {idl.name: tok for tok, idl
                in rings.shipped_ideals(ring, prime_bound=pb).items()}
    full = poset.build_poset(entries, uni)
    dots = {"combined": poset.poset_dot(full, title=f"{ring.alias} forest")}
    for t in forest.trees:
        sub = [e for e in entries
               if e.qo.declared_support.name == t.support]
        subposet = poset.build_poset(sub, uni)
        dots[t.support] = poset.poset_dot(
            subposet, title=f"{ring.alias} support {t.support}")
    payload["dot"] = dots
    if cfg.get("dot"):
        stem = _dot_stem(cfg["dot"])
        _write_dot(f"{stem}_all.dot", dots["combined"])
        for t in forest.trees:
            _write_dot(f"{stem}_{token_of[t.support]}.dot",
                       dots[t.support])
    _say(f"{ring.alias}: {len(forest.trees)} trees "
         f"({', '.join(t.support for t in forest.trees)})")
    if args.relation == "le":
        for d in forest.cross:
            _say(f"cross-support: {d.p_id} <= {d.q_id} ({d.status})")
    _emit(_report("forest", cfg, "ok" if forest.ok else "fail", payload),
          cfg)
    return 0 if forest.ok else 1


def cmd_convex(args, cfg):
    pb = int(cfg.get("prime_bound", 5))
    entry = _resolve(args.qo, pb)
    ring = entry.qo.ring
    ideals = rings.shipped_ideals(ring, prime_bound=pb)
    if args.ideal not in ideals:
        raise UsageError(f"unknown ideal {args.ideal!r} for {ring.alias}; "
                         f"one of {sorted(ideals)}")
    ideal = ideals[args.ideal]
    need = _needed_magnitude([entry.id])
    if ring is rings.INTEGERS and args.ideal.isdigit():
        need = max(need, int(args.ideal))
    uni = _universe(ring, cfg, min_b=need)
    res = poset.qcomp_equivalence(entry.qo, ideal, uni)
    _say(f"{entry.id} / {ideal.name}: "
         f"{'convex' if res['convex'] else 'not convex'}, both routes "
         f"agree")
    _emit(_report("convex", cfg, "ok", {"qcomp": res}), cfg)
    return 0


def _cmd_predicate(args, cfg, predicate):
    pb = int(cfg.get("prime_bound", 5))
    if args.ids:
        targets = [_resolve(i, pb) for i in args.ids]
    else:
        targets = list(catalog(_ring(cfg), prime_bound=pb))
    fn = (predicates.is_special if predicate == "special"
          else predicates.is_manis)
    universes = {}
    need = _needed_magnitude([e.id for e in targets])
    out = []
    for e in targets:
        ring = e.qo.ring
        if ring.alias not in universes:
            universes[ring.alias] = _universe(ring, cfg, min_b=need)
        v = fn(e, universes[ring.alias])
        out.append(v.to_dict())
        tail = f" ({v.rule})" if v.rule else ""
        _say(f"{e.id}: {v.status}{tail}")
    _emit(_report(predicate, cfg, "ok", {"verdicts": out}), cfg)
    return 0


def cmd_special(args, cfg):
    return _cmd_predicate(args, cfg, "special")


def cmd_manis(args, cfg):
    return _cmd_predicate(args, cfg, "manis")


def _strip_elapsed(result):
    return {k: v for k, v in result.items() if k != "elapsed_s"}


def cmd_suite(args, cfg):
    if args.inner:
        battery = acceptance.run_battery(corrupt=args.demo_corrupt)
        criteria = [_strip_elapsed(r) for r in battery["criteria"]]
        status = "ok" if battery["pass"] else "fail"
        _emit(_report("suite", cfg, status, {"criteria": criteria}), cfg)
        return 0 if battery["pass"] else 1

    # determinism is checked at process level: the whole battery runs
    # twice and the two documents must agree byte for byte
    cmd = [sys.executable, "-m", "quasiord", "suite", "--inner"]
    for key in ("ring", "bound", "max_exp", "max_terms", "coeffs",
                "samples", "seed", "prime_bound"):
        if key in cfg:
            flag = "--" + key.replace("_", "-")
            cmd.append(f"{flag}={cfg[key]}")
    if args.demo_corrupt:
        cmd.append("--demo-corrupt")
    runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
    identical = runs[0].stdout == runs[1].stdout
    try:
        inner = json.loads(runs[0].stdout)
    except ValueError:
        sys.stderr.buffer.write(runs[0].stderr)
        raise verifier.EngineError("suite worker produced no report")
    criteria = inner["criteria"]
    criteria.append({"id": 9, "name": "determinism",
                     "pass": identical,
                     "details": {"runs": 2,
                                 "report_bytes": len(runs[0].stdout),
                                 "identical": identical}})
    failing = [c["id"] for c in criteria if not c["pass"]]
    for c in criteria:
        _say(f"criterion {c['id']} ({c['name']}): "
             f"{'PASS' if c['pass'] else 'FAIL'}")
    if failing:
        _say(f"first failing criterion: {failing[0]}")
    status = "ok" if not failing else "fail"
    payload = {"criteria": criteria,
               "first_failing": failing[0] if failing else None}
    _emit(_report("suite", cfg, status, payload), cfg)
    return 0 if not failing else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--ring", help="Z, QX, or QXY (default Z)")
    shared.add_argument("--bound", type=int,
                        help="integer magnitude bound B")
    shared.add_argument("--max-exp", dest="max_exp", type=int,
                        help="polynomial exponent bound D")
    shared.add_argument("--max-terms", dest="max_terms", type=int,
                        help="polynomial term bound T")
    shared.add_argument("--coeffs",
                        help="coefficient list, e.g. --coeffs=-2,-1,1,2")
    shared.add_argument("--samples", type=int,
                        help="extra random sample count S")
    shared.add_argument("--seed", type=int, help="sampling seed")
    shared.add_argument("--out", help="also write the JSON report here")
    shared.add_argument("--dot", help="write DOT graph output here")
    shared.add_argument("--config", help="JSON config file")
    shared.add_argument("--prime-bound", dest="prime_bound", type=int,
                        help="largest prime in the integer catalog")

    p = argparse.ArgumentParser(
        prog="quasiord",
        description="exact calculus of quasi-orderings on unital rings")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[shared],
                   help="list the quasi-orderings shipped for a ring")

    c = sub.add_parser("check", parents=[shared],
                       help="axioms, dichotomy, and value extraction")
    c.add_argument("ids", nargs="*", help="qo ids (default: whole ring)")
    c.add_argument("--mutant", choices=["swap", "neg-unit", "trans-break"],
                   help="corrupt the oracle first (negative control)")

    c = sub.add_parser("compare", parents=[shared],
                       help="decide one coarsening question")
    c.add_argument("p")
    c.add_argument("q")

    c = sub.add_parser("tree", parents=[shared],
                       help="fixed-support tree with certificates")
    c.add_argument("--support", required=True,
                   help="support token: 0, a prime, X, Y, or XY")

    c = sub.add_parser("forest", parents=[shared],
                       help="partition the whole catalog by support")
    c.add_argument("--relation", choices=["le"],
                   help="'le' also reports cross-support pairs")

    c = sub.add_parser("convex", parents=[shared],
                       help="convexity of an ideal, both routes")
    c.add_argument("qo")
    c.add_argument("ideal", help="ideal token: 0, a prime, X, Y, or XY")

    for name in ("special", "manis"):
        c = sub.add_parser(name, parents=[shared],
                           help=f"{name} verdicts with witness maps")
        c.add_argument("ids", nargs="*",
                       help="qo ids (default: whole ring)")

    c = sub.add_parser("suite", parents=[shared],
                       help="run the full acceptance battery")
    c.add_argument("--demo-corrupt", action="store_true",
                   help="corrupt a catalog flag to show a controlled "
                        "failure")
    c.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    return p


_DISPATCH = {
    "catalog": cmd_catalog,
    "check": cmd_check,
    "compare": cmd_compare,
    "tree": cmd_tree,
    "forest": cmd_forest,
    "convex": cmd_convex,
    "special": cmd_special,
    "manis": cmd_manis,
    "suite": cmd_suite,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        return _DISPATCH[args.command](args, cfg)
    except UsageError as exc:
        _say(f"error: {exc}")
        return 2
    except poset.UnsoundUniverseError as exc:
        _say(f"unsound universe: {exc}")
        return 1
    except verifier.EngineError as exc:
        _say(f"engine defect: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
