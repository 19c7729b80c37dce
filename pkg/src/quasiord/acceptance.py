"""Desk-scale acceptance battery.

Each criterion function returns a dict with ``id``, ``name``, ``pass`` and
``details``.  Wall-clock budgets are enforced where stated and reported as
a boolean; the measured seconds live under the ``elapsed_s`` key, which
report writers strip so that identical configurations serialize to
identical bytes.

The criteria pin their own universes.  Shrinking the shared bounds in a
run configuration therefore does not weaken the battery; the configured
bounds apply to the ad-hoc commands, not to the acceptance runs.
"""

from time import perf_counter

from . import poset, predicates, rings, verifier
from .catalog import ORDERING, VALUATION, catalog, catalog_by_id, classify

ALL_RINGS = (rings.INTEGERS, rings.POLY_UNI, rings.POLY_BI)


def _result(cid, name, ok, details, elapsed, budget=None):
    out = {"id": cid, "name": name, "pass": bool(ok), "details": details,
           "elapsed_s": elapsed}
    if budget is not None:
        out["details"]["budget_s"] = budget
        out["details"]["budget_met"] = elapsed < budget
        out["pass"] = out["pass"] and elapsed < budget
    return out


def criterion_1_axiom_battery(corrupt=False):
    """Every catalog member passes the quasi-ordering axioms exhaustively
    on the default universes, and every mutant oracle fails some axiom."""
    t0 = perf_counter()
    failures = []
    counts = {}
    for ring in ALL_RINGS:
        uni = rings.default_universe(ring)
        for e in catalog(ring):
            rep = verifier.check_qr_axioms(e.qo, uni)
            counts[e.id] = sum(o.covered for o in rep.outcomes)
            if not rep.passed:
                failures.append({"qo": e.id,
                                 "failed": [o.to_dict()
                                            for o in rep.failures]})
    z_uni = rings.default_universe(rings.INTEGERS)
    zby = catalog_by_id(rings.INTEGERS)
    mutants = []
    for base in ("Z:leq", "Z:vp:2"):
        mrep = verifier.mutation_suite(zby[base].qo, z_uni)
        for entry in mrep.entries:
            mutants.append({"mutant": entry["mutant"],
                            "failed_axioms": entry["failed_axioms"]})
    mutant_kinds = {m["mutant"].rsplit("#", 1)[-1] for m in mutants}
    mutants_ok = (all(m["failed_axioms"] for m in mutants)
                  and mutant_kinds >= {"swap", "trans-break", "neg-unit"})
    details = {"entries_checked": len(counts),
               "tuples_covered": sum(counts.values()),
               "failures": failures, "mutants": mutants}
    return _result(1, "axiom battery", not failures and mutants_ok,
                   details, perf_counter() - t0, budget=60.0)


def criterion_2_dichotomy(corrupt=False):
    """classify agrees with the declared kind everywhere; valuation-kind
    members admit full value-semigroup extraction, ordering-kind members
    pass the cone axioms."""
    t0 = perf_counter()
    mismatches = []
    extracted = []
    orderings = []
    for ring in ALL_RINGS:
        uni = rings.default_universe(ring)
        for e in catalog(ring):
            kind = classify(e.qo)
            if kind != e.qo.declared_kind:
                mismatches.append({"qo": e.id, "declared":
                                   e.qo.declared_kind, "classified": kind})
                continue
            if kind == VALUATION:
                vt = verifier.extract_valuation(e.qo, uni)
                extracted.append({"qo": e.id,
                                  "classes": vt.n_base,
                                  "counters": dict(vt.counters)})
            else:
                rep = verifier.check_ordering_axioms(e.qo, uni)
                orderings.append({"qo": e.id, "passed": rep.passed})
    ok = (not mismatches and all(o["passed"] for o in orderings)
          and len(extracted) + len(orderings) > 0)
    details = {"mismatches": mismatches, "valuations": extracted,
               "orderings": orderings}
    return _result(2, "dichotomy", ok, details, perf_counter() - t0)


def criterion_3_integer_tree(corrupt=False):
    """Support-(0) tree over the integers with prime bound 23: trivial
    maximum, everything else a leaf, all pairwise comparisons among the
    ordering and the p-adic members refuted with rechecked witnesses.

    The stated witness bound B=12 cannot hold: refuting vp <= vq needs a
    pair with q dividing y, so |y| >= q, and the catalog reaches q = 23.
    The battery runs at B=23, the least magnitude that can witness every
    refutation, and demonstrates that B=12 is structurally too small by
    expecting the separation error there.
    """
    t0 = perf_counter()
    entries = catalog(rings.INTEGERS, prime_bound=23)
    group = [e for e in entries if e.qo.declared_support.name == "(0)"]
    uni = rings.enumerate_universe(rings.INTEGERS,
                                   rings.UniverseBounds(B=23))
    cposet = poset.build_poset(group, uni)
    tree = poset.check_tree(group, uni, poset=cposet)
    problems = list(tree.violations)
    if tree.root != "Z:triv:0":
        problems.append(f"root is {tree.root}")
    leaves = [p for p in tree.members if p != tree.root]
    for p in leaves:
        if tree.parent.get(p) != tree.root:
            problems.append(f"{p} is not a leaf under the root")

    refuted = []
    oracles = [e.id for e in group if not e.qo.is_trivial()]
    by_id = {e.id: e for e in group}
    for p in oracles:
        for q in oracles:
            if p == q:
                continue
            dec = cposet.decisions[(p, q)]
            if dec.status != poset.REFUTED:
                problems.append(f"{p} <= {q} not refuted")
                continue
            x = uni.ring.parse(dec.witness["x"])
            y = uni.ring.parse(dec.witness["y"])
            if not poset.validate_coarsening_witness(
                    by_id[p].qo, by_id[q].qo, x, y):
                problems.append(f"witness for {p} <= {q} fails recheck")
            if max(abs(x), abs(y)) > 23:
                problems.append(f"witness for {p} <= {q} above B=23")
            refuted.append({"p": p, "q": q, "witness": dec.witness})

    small = rings.enumerate_universe(rings.INTEGERS,
                                     rings.UniverseBounds(B=12))
    try:
        poset.build_poset(group, small)
        problems.append("B=12 failed to raise the separation error")
        b12 = "no error"
    except poset.UnsoundUniverseError as exc:
        b12 = str(exc)
    details = {"members": tree.members, "root": tree.root,
               "pairwise_refuted": len(refuted), "refutations": refuted,
               "b12_repair": b12, "violations": problems}
    return _result(3, "integer tree reproduction", not problems, details,
                   perf_counter() - t0, budget=10.0)


def criterion_4_bivariate_diamond(corrupt=False):
    """The bivariate diamond: v below both u and w, u and w refuting each
    other with the pinned witness pairs, and the (Y)-convexity facts."""
    t0 = perf_counter()
    ring = rings.POLY_BI
    uni = rings.default_universe(ring)
    by = catalog_by_id(ring)
    problems = []
    decisions = {}

    def decide(a, b):
        dec = poset.compare_entries(by[a], by[b], uni)
        decisions[f"{a} <= {b}"] = dec.to_dict()
        return dec

    for a, b in (("QXY:v", "QXY:u"), ("QXY:v", "QXY:w"),
                 ("QXY:v", "QXY:triv:Y"), ("QXY:u", "QXY:triv:0"),
                 ("QXY:w", "QXY:triv:Y")):
        if not decide(a, b).holds:
            problems.append(f"{a} <= {b} refuted")
    for a, b in (("QXY:u", "QXY:w"), ("QXY:w", "QXY:u")):
        if decide(a, b).status != poset.REFUTED:
            problems.append(f"{a} <= {b} not refuted")

    X, X2 = ring.parse("X"), ring.parse("X^2")
    Y, Y2 = ring.parse("Y"), ring.parse("Y^2")
    u, w = by["QXY:u"].qo, by["QXY:w"].qo
    pinned = {
        "u <= w by (X, X^2)": poset.validate_coarsening_witness(u, w, X, X2),
        "w <= u by (Y, Y^2)": poset.validate_coarsening_witness(w, u, Y, Y2),
    }
    values = {"w(X)": w.value_of(X), "w(X^2)": w.value_of(X2),
              "u(X)": u.value_of(X), "u(X^2)": u.value_of(X2)}
    if not all(pinned.values()):
        problems.append(f"pinned witnesses failed: {pinned}")
    if not (values["w(X)"] == (1,) and values["w(X^2)"] == (2,)
            and values["u(X)"] == (0,) and values["u(X^2)"] == (0,)):
        problems.append(f"pinned values off: {values}")

    ideal = rings.shipped_ideals(ring)["Y"]
    convex = {}
    for qid in ("QXY:v", "QXY:w", "QXY:u"):
        chk = poset.convexity_check(by[qid].qo, ideal, uni)
        convex[qid] = chk["convex"]
        if not chk["convex"]:
            problems.append(f"(Y) not convex for {qid}: {chk['witness']}")
    details = {"decisions": decisions, "pinned_witnesses": pinned,
               "pinned_values": {k: list(v) for k, v in values.items()},
               "y_convex": convex, "violations": problems}
    return _result(4, "bivariate diamond reproduction", not problems,
                   details, perf_counter() - t0, budget=30.0)


def criterion_5_certificates(corrupt=False):
    """Every default poset is a partial order, every fixed-support part
    certifies as a tree, and the integer and univariate trees satisfy both
    chain conditions."""
    t0 = perf_counter()
    problems = []
    details = {"posets": {}, "kaplansky": {}}
    for ring in ALL_RINGS:
        uni = rings.default_universe(ring)
        entries = catalog(ring)
        cposet = poset.build_poset(entries, uni)
        ids = cposet.ids
        for p in ids:
            if not cposet.holds(p, p):
                problems.append(f"{p} not reflexive")
        for p in ids:
            for q in ids:
                if p != q and cposet.holds(p, q) and cposet.holds(q, p):
                    problems.append(f"{p} and {q} not antisymmetric")
                for r in ids:
                    if cposet.holds(p, q) and cposet.holds(q, r) \
                            and not cposet.holds(p, r):
                        problems.append(f"{p} <= {q} <= {r} not transitive")
        forest = poset.forest_partition(entries, uni)
        if not forest.ok:
            problems.append(f"{ring.alias} forest has tree violations")
        details["posets"][ring.alias] = {
            "members": len(ids),
            "trees": [{"support": t.support, "root": t.root,
                       "ok": t.ok} for t in forest.trees]}
    for ring in (rings.INTEGERS, rings.POLY_UNI):
        uni = rings.default_universe(ring)
        group = [e for e in catalog(ring)
                 if e.qo.declared_support.name == "(0)"]
        rep = predicates.kaplansky_check(group, uni)
        details["kaplansky"][ring.alias] = rep
        if rep["K1"] != "Pass" or rep["K2"] != "Pass":
            problems.append(f"{ring.alias} chain conditions: "
                            f"{rep['K1']}/{rep['K2']}")
    details["violations"] = problems
    return _result(5, "partial order and tree certificates", not problems,
                   details, perf_counter() - t0)


def criterion_6_convexity_equivalence(corrupt=False):
    """Both convexity routes agree for every catalog member against every
    shipped ideal of its ring."""
    t0 = perf_counter()
    problems = []
    agreements = []
    for ring in ALL_RINGS:
        uni = rings.default_universe(ring)
        ideals = rings.shipped_ideals(ring)
        for e in catalog(ring):
            for idl in ideals.values():
                try:
                    res = poset.qcomp_equivalence(e.qo, idl, uni)
                except verifier.EngineError as exc:
                    problems.append(str(exc))
                    continue
                agreements.append({"qo": e.id, "ideal": idl.name,
                                   "convex": res["convex"]})
    details = {"pairs_checked": len(agreements),
               "agreements": agreements, "violations": problems}
    return _result(6, "convexity equivalence", not problems, details,
                   perf_counter() - t0)


def criterion_7_structure_predicates(corrupt=False):
    """The pinned verdicts, Manis implies special, monotone transfer along
    non-refuted edges, and the per-support subtree decomposition.

    ``corrupt`` deliberately zeroes out the semigroup flag the exact rule
    for Z:vp:2 relies on, demonstrating a controlled failure.
    """
    t0 = perf_counter()
    problems = []
    verdict_summary = {}
    for ring in ALL_RINGS:
        uni = rings.default_universe(ring)
        entries = catalog(ring)
        if corrupt and ring == rings.INTEGERS:
            byid = {e.id: e for e in entries}
            byid["Z:vp:2"].qo.semigroup = dict(
                byid["Z:vp:2"].qo.semigroup, nonnegative=False)
        verdicts = predicates.predicate_verdicts(entries, uni)
        for i, v in verdicts.items():
            verdict_summary[i] = {
                "special": v["special"].status,
                "manis": v["manis"].status}
            if v["manis"].holds is True and v["special"].holds is not True:
                problems.append(f"{i} Manis without special")
            if i.startswith("Z:vp:") and not (
                    v["special"].status == "RefutedByRule"
                    and v["special"].rule == "value-semigroup-nonnegative"):
                problems.append(f"{i} lacks the exact non-special rule")
        trivials = [e.id for e in entries if e.qo.is_trivial()]
        for i in trivials:
            if verdicts[i]["manis"].holds is not True:
                problems.append(f"trivial {i} not Manis")
        cposet = poset.build_poset(entries, uni)
        inter = predicates.interplay_check(cposet, uni, verdicts=verdicts)
        if not inter["ok"]:
            problems.extend(inter["violations"])
        sub = predicates.subtree_check(entries, uni, verdicts=verdicts)
        if not sub["ok"]:
            problems.extend(sub["violations"])
    if verdict_summary.get("Z:leq") != {"special": "Witnessed",
                                        "manis": "RefutedByRule"}:
        problems.append("Z:leq verdict pair off")
    details = {"verdicts": verdict_summary, "violations": problems}
    return _result(7, "structure predicates", not problems, details,
                   perf_counter() - t0)


def criterion_8_dependency(corrupt=False):
    """Independence of the integer members, the univariate blocks, and
    transitivity of the computed relation."""
    t0 = perf_counter()
    problems = []
    details = {}
    z_uni = rings.default_universe(rings.INTEGERS)
    zby = catalog_by_id(rings.INTEGERS)
    zg = [zby[i] for i in ("Z:leq", "Z:vp:2", "Z:vp:3", "Z:vp:5",
                           "Z:triv:0")]
    dp = predicates.dependency_classes(zg, z_uni)
    details["Z"] = dp.to_dict()
    if dp.blocks != [["Z:leq"], ["Z:vp:2"], ["Z:vp:3"], ["Z:vp:5"]]:
        problems.append(f"integer blocks off: {dp.blocks}")

    qx_uni = rings.default_universe(rings.POLY_UNI)
    qby = catalog_by_id(rings.POLY_UNI)
    qg = [qby[i] for i in ("QX:Pa", "QX:Pna", "QX:vdeg", "QX:w",
                           "QX:triv:0")]
    dp = predicates.dependency_classes(qg, qx_uni)
    details["QX"] = dp.to_dict()
    if ["QX:Pna", "QX:vdeg"] not in dp.blocks:
        problems.append(f"univariate blocks off: {dp.blocks}")
    if dp.pairs[("QX:Pna", "QX:vdeg")]["shared"] != ["QX:vdeg"]:
        problems.append("Pna and vdeg do not share via vdeg")

    qxy_uni = rings.default_universe(rings.POLY_BI)
    bby = catalog_by_id(rings.POLY_BI)
    bg = [bby[i] for i in ("QXY:v", "QXY:u", "QXY:triv:0")]
    details["QXY"] = predicates.dependency_classes(bg, qxy_uni).to_dict()
    details["violations"] = problems
    return _result(8, "dependency classes", not problems, details,
                   perf_counter() - t0)


CRITERIA = (
    criterion_1_axiom_battery,
    criterion_2_dichotomy,
    criterion_3_integer_tree,
    criterion_4_bivariate_diamond,
    criterion_5_certificates,
    criterion_6_convexity_equivalence,
    criterion_7_structure_predicates,
    criterion_8_dependency,
)


def run_battery(corrupt=False):
    """Criteria 1 through 8; determinism (criterion 9) needs two full
    process-level runs and is driven by the suite command and the
    acceptance tests."""
    results = [fn(corrupt=corrupt) for fn in CRITERIA]
    return {"criteria": results,
            "pass": all(r["pass"] for r in results)}
