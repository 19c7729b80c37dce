"""Structure predicates: special and Manis quasi-orderings, monotonicity
along coarsening, the per-support decomposition of the special members,
dependency classes, and the two chain conditions on coarsening trees.

A quasi-ordering is special when every non-support x admits some y with
1 <= x*y, and Manis when y can be chosen with 1 ~ x*y.  The witness
search runs over a finite universe, so it can only certify presence;
absence is asserted solely through registered exact rules arguing about
the whole ring, and a rule can likewise certify presence when no finite
witness map exists.  A search that comes up short with no applicable rule
stays Unknown with its bounds.

Verdicts therefore take one of four statuses: Witnessed, VerifiedByRule,
RefutedByRule, Unknown.

Registered rules:
  value-semigroup-nonnegative  (not special) a valuation with nonnegative
      nontrivial value semigroup has v(x*y) = v(x) + v(y) >= v(x) > v(1)
      whenever v(x) > 0, so such x admits no witness.
  convex-ideal-above-support   (not special) a proper convex ideal
      strictly above the support contains an element x for which x*y
      stays inside the ideal, hence strictly below 1; the declared ideal
      is re-verified convex on the universe before the rule may fire.
  support-maximal /            (Manis / not Manis) for ordering-kind the
  support-not-maximal          Manis property is equivalent to maximality
      of the support, so the verdict is decided by the declared ideal and
      the witness search is redundant.
  value-semigroup-not-group    (not Manis) 1 ~ x*y needs v(y) = -v(x),
      impossible when the value semigroup has no inverses.
"""

from __future__ import annotations

from itertools import combinations

from .catalog import (EQUIVALENT, GREATER, LESS, ORDERING, VALUATION,
                      CatalogEntry)
from .rings import shipped_ideals
from .verifier import EngineError
from . import poset as poset_mod

SPECIAL = "special"
MANIS = "manis"

WITNESSED = "Witnessed"
VERIFIED_BY_RULE = "VerifiedByRule"
REFUTED_BY_RULE = "RefutedByRule"
UNKNOWN = "Unknown"


class Verdict:
    def __init__(self, predicate, qo_id, status, witness=None, rule=None,
                 explanation=None, bounds=None):
        self.predicate = predicate
        self.qo_id = qo_id
        self.status = status
        self.witness = witness
        self.rule = rule
        self.explanation = explanation
        self.bounds = bounds

    @property
    def holds(self):
        """True, False, or None for Unknown."""
        if self.status in (WITNESSED, VERIFIED_BY_RULE):
            return True
        if self.status == REFUTED_BY_RULE:
            return False
        return None

    def to_dict(self):
        d = {"predicate": self.predicate, "qo": self.qo_id,
             "status": self.status}
        if self.witness is not None:
            d["witness"] = [[x, y] for x, y in self.witness]
        if self.rule is not None:
            d["rule"] = self.rule
        if self.explanation is not None:
            d["explanation"] = self.explanation
        if self.bounds is not None:
            d["bounds"] = self.bounds
        return d

    def __repr__(self):
        return f"Verdict({self.qo_id} {self.predicate}: {self.status})"


def _node(node):
    if isinstance(node, CatalogEntry):
        return node.qo, node.metadata
    return node, {}


def _search_map(qo, universe, accept):
    """Per non-support x, the first universe y accepted for x*y."""
    ring = qo.ring
    one, zero = ring.one(), ring.zero()
    wmap = []
    for x in universe:
        if qo.compare(x, zero) == EQUIVALENT:
            continue
        found = None
        for y in universe:
            if accept(qo.compare(one, ring.mul(x, y))):
                found = y
                break
        if found is None:
            return wmap, x
        wmap.append((ring.show(x), ring.show(found)))
    return wmap, None


def recheck_witness_map(qo, verdict, universe):
    """Re-validate a witness map element by element against the oracle and
    confirm it covers exactly the non-support part of the universe."""
    if verdict.witness is None:
        return False
    ring = qo.ring
    one, zero = ring.one(), ring.zero()
    want_equiv = verdict.predicate == MANIS
    seen = []
    for xs, ys in verdict.witness:
        x, y = ring.parse(xs), ring.parse(ys)
        c = qo.compare(one, ring.mul(x, y))
        if want_equiv and c != EQUIVALENT:
            return False
        if not want_equiv and c == GREATER:
            return False
        seen.append(xs)
    expected = [ring.show(x) for x in universe
                if qo.compare(x, zero) != EQUIVALENT]
    return seen == expected


def _positive_example(qo, semigroup):
    ex = semigroup.get("positive_example")
    if ex is None:
        return None
    return ex if not isinstance(ex, str) else qo.ring.parse(ex)


def _semigroup_nonnegative_rule(qo):
    sg = getattr(qo, "semigroup", None)
    if qo.declared_kind != VALUATION or not sg:
        return None
    if not sg.get("nonnegative") or sg.get("trivial"):
        return None
    x0 = _positive_example(qo, sg)
    if x0 is None:
        return None
    # the premise is oracle-checkable: strictly positive value means
    # strictly below 1
    if qo.compare(x0, qo.ring.one()) != LESS:
        raise EngineError(
            f"{qo.id}: declared positive example {qo.ring.show(x0)} does "
            f"not sit strictly below 1")
    s = qo.ring.show(x0)
    return ("value-semigroup-nonnegative",
            f"the value semigroup is {sg['description']}; v({s}) > 0, so "
            f"v({s}*y) = v({s}) + v(y) >= v({s}) > v(1) for every y and "
            f"1 <= {s}*y never holds")


def _convex_ideal_rule(qo, meta, universe):
    token = meta.get("convex_ideal_above_support")
    if token is None:
        return None
    ideal = shipped_ideals(qo.ring)[token]
    support = qo.declared_support
    if ideal == support or not all(ideal.contains(g)
                                   for g in support.generators):
        raise EngineError(
            f"{qo.id}: declared convex ideal {ideal.name} is not strictly "
            f"above the support {support.name}")
    chk = poset_mod.convexity_check(qo, ideal, universe)
    if not chk["convex"]:
        raise EngineError(
            f"{qo.id}: declared convex ideal {ideal.name} fails the "
            f"convexity search, witness {chk['witness']}")
    return ("convex-ideal-above-support",
            f"{ideal.name} is a proper convex ideal strictly above the "
            f"support, so for x in {ideal.name} every x*y stays in the "
            f"ideal and below 1; convexity re-verified on the universe "
            f"({chk['pairs_checked']} pairs)")


def is_special(node, universe):
    """Witness search for 1 <= x*y over the universe, then exact rules."""
    qo, meta = _node(node)
    wmap, missing = _search_map(qo, universe,
                                lambda c: c != GREATER)
    if missing is None:
        return Verdict(SPECIAL, qo.id, WITNESSED, witness=wmap)
    rule = _semigroup_nonnegative_rule(qo) \
        or _convex_ideal_rule(qo, meta, universe)
    if rule is not None:
        return Verdict(SPECIAL, qo.id, REFUTED_BY_RULE, rule=rule[0],
                       explanation=rule[1])
    return Verdict(SPECIAL, qo.id, UNKNOWN, bounds={
        "universe": universe.describe(), "witnessed": len(wmap),
        "first_unwitnessed": qo.ring.show(missing)})


def is_manis(node, universe):
    """Witness search for 1 ~ x*y; ordering-kind is decided by the
    support-maximality rule, which is exact in both directions."""
    qo, _meta = _node(node)
    if qo.declared_kind == ORDERING:
        support = qo.declared_support
        if support.is_maximal:
            return Verdict(
                MANIS, qo.id, VERIFIED_BY_RULE, rule="support-maximal",
                explanation=f"an ordering-kind quasi-ordering is Manis "
                            f"exactly when its support is maximal, and "
                            f"{support.name} is maximal")
        return Verdict(
            MANIS, qo.id, REFUTED_BY_RULE, rule="support-not-maximal",
            explanation=f"an ordering-kind quasi-ordering is Manis exactly "
                        f"when its support is maximal, and {support.name} "
                        f"is not maximal")
    wmap, missing = _search_map(qo, universe,
                                lambda c: c == EQUIVALENT)
    if missing is None:
        return Verdict(MANIS, qo.id, WITNESSED, witness=wmap)
    sg = getattr(qo, "semigroup", None)
    if sg and not sg.get("is_group") and not sg.get("trivial"):
        evidence = sg.get("no_inverse_note")
        if evidence is None:
            x0 = _positive_example(qo, sg)
            s = qo.ring.show(x0) if x0 is not None else "x"
            evidence = f"v({s}) > 0 and no element has value -v({s})"
        return Verdict(
            MANIS, qo.id, REFUTED_BY_RULE, rule="value-semigroup-not-group",
            explanation=f"1 ~ x*y needs v(y) = -v(x); the value semigroup "
                        f"is {sg['description']}, not a group: {evidence}")
    return Verdict(MANIS, qo.id, UNKNOWN, bounds={
        "universe": universe.describe(), "witnessed": len(wmap),
        "first_unwitnessed": qo.ring.show(missing)})


# ---------------------------------------------------------------------------
# monotonicity along coarsening and the per-support decomposition
# ---------------------------------------------------------------------------

def predicate_verdicts(entries, universe):
    return {e.id: {SPECIAL: is_special(e, universe),
                   MANIS: is_manis(e, universe)} for e in entries}


def interplay_check(cposet, universe, verdicts=None):
    """Both predicates transfer up every non-refuted coarsening, and a
    Manis member is special; violations would contradict the theorems."""
    if verdicts is None:
        verdicts = predicate_verdicts(cposet.entries, universe)
    violations = []
    pairs_checked = 0
    for p in cposet.ids:
        for q in cposet.ids:
            if p == q or not cposet.holds(p, q):
                continue
            for pred in (SPECIAL, MANIS):
                if verdicts[p][pred].holds is not True:
                    continue
                pairs_checked += 1
                if verdicts[q][pred].holds is False:
                    violations.append(
                        f"{pred} does not transfer along {p} <= {q}")
    for i, v in verdicts.items():
        if v[MANIS].holds is True and v[SPECIAL].holds is False:
            violations.append(f"{i} is Manis but not special")
    return {"pairs_checked": pairs_checked, "violations": violations,
            "ok": not violations,
            "verdicts": {i: {k: w.to_dict() for k, w in v.items()}
                         for i, v in verdicts.items()}}


def subtree_check(entries, universe, verdicts=None):
    """The special members of each fixed-support tree form an upward
    closed set containing the trivial member, and special members of
    different supports never coarsen one another.  The Manis analogue is
    checked identically; the source states it by analogy only, which the
    report records."""
    cposet = poset_mod.build_poset(entries, universe)
    if verdicts is None:
        verdicts = predicate_verdicts(entries, universe)
    supp = {e.id: e.qo.declared_support.name for e in entries}
    order = []
    for e in entries:
        if supp[e.id] not in order:
            order.append(supp[e.id])

    violations = []
    groups = []
    for pred in (SPECIAL, MANIS):
        for s in order:
            members = [e for e in entries if supp[e.id] == s]
            pos = [e.id for e in members if verdicts[e.id][pred].holds]
            trivial = [e.id for e in members if e.qo.is_trivial()]
            if not trivial or trivial[0] not in pos:
                violations.append(
                    f"{pred}: trivial member of support {s} missing from "
                    f"the positive set")
            for p in pos:
                for e in members:
                    if cposet.holds(p, e.id) \
                            and verdicts[e.id][pred].holds is False:
                        violations.append(
                            f"{pred}: {e.id} above {p} in the {s} tree "
                            f"but negative")
            if pred == SPECIAL:
                groups.append({"support": s,
                               "members": [e.id for e in members],
                               "special": pos})
            else:
                groups[order.index(s)]["manis"] = pos
        for p in cposet.ids:
            for q in cposet.ids:
                if p == q or supp[p] == supp[q]:
                    continue
                if verdicts[p][pred].holds and verdicts[q][pred].holds \
                        and cposet.decisions[(p, q)].holds:
                    violations.append(
                        f"{pred}: cross-support coarsening {p} <= {q} "
                        f"between positive members not refuted")
    return {"groups": groups, "violations": violations,
            "ok": not violations,
            "manis_provenance": "checked by the same subtree criterion; "
                                "the source asserts the Manis case by "
                                "analogy without separate proof"}


# ---------------------------------------------------------------------------
# dependency classes on a fixed-support tree
# ---------------------------------------------------------------------------

class DependencyPartition:
    def __init__(self, nodes, blocks, pairs):
        self.nodes = nodes
        self.blocks = blocks
        self.pairs = pairs

    def to_dict(self):
        return {"nodes": self.nodes, "blocks": self.blocks,
                "pairs": [{"a": a, "b": b,
                           "dependent": j["dependent"],
                           "shared": j["shared"]}
                          for (a, b), j in sorted(self.pairs.items())]}


def dependency_classes(entries, universe, cposet=None):
    """Two non-trivial same-support members are dependent when they share
    a coarsening other than the trivial member.  Transitivity is a theorem
    about quasi-orderings; it is re-verified here and a failure is an
    engine-stopping contradiction, not a report entry."""
    supports = {e.qo.declared_support.name for e in entries}
    if len(supports) != 1:
        raise ValueError(
            f"dependency needs one shared support, got {sorted(supports)}")
    if cposet is None:
        cposet = poset_mod.build_poset(entries, universe)
    trivial = {e.id for e in entries if e.qo.is_trivial()}
    nodes = [e.id for e in entries if e.id not in trivial]
    ids = [e.id for e in entries]

    def shared(a, b):
        return [r for r in ids if r not in trivial
                and cposet.holds(a, r) and cposet.holds(b, r)]

    pairs = {}
    rel = {}
    for a, b in combinations(nodes, 2):
        s = shared(a, b)
        pairs[(a, b)] = {"dependent": bool(s), "shared": s}
        rel[(a, b)] = rel[(b, a)] = bool(s)
    for a in nodes:
        rel[(a, a)] = True
    for a in nodes:
        for b in nodes:
            for c in nodes:
                if rel[(a, b)] and rel[(b, c)] and not rel[(a, c)]:
                    raise EngineError(
                        f"dependency is not transitive: {a} ~ {b} ~ {c} "
                        f"but {a} is independent of {c}")
    blocks = []
    assigned = set()
    for n in nodes:
        if n in assigned:
            continue
        block = [m for m in nodes if rel[(n, m)]]
        assigned.update(block)
        blocks.append(block)
    return DependencyPartition(nodes, blocks, pairs)


# ---------------------------------------------------------------------------
# chain conditions on a finite coarsening tree
# ---------------------------------------------------------------------------

def kaplansky_check(entries, universe, cposet=None):
    """K1: every chain has a supremum and an infimum within the node set.
    K2: every strict pair a < b contains a covering pair a <= c < d <= b."""
    supports = {e.qo.declared_support.name for e in entries}
    if len(supports) != 1:
        raise ValueError(
            f"chain conditions need one shared support, got "
            f"{sorted(supports)}")
    if cposet is None:
        cposet = poset_mod.build_poset(entries, universe)
    ids = [e.id for e in entries]
    n = len(ids)
    comp = {(a, b): cposet.holds(a, b) or cposet.holds(b, a)
            for a in ids for b in ids}

    def strictly(a, b):
        return a != b and cposet.holds(a, b)

    k1_failures = []
    chains = 0
    for mask in range(1, 1 << n):
        chain = [ids[i] for i in range(n) if mask >> i & 1]
        if any(not comp[(a, b)] for a, b in combinations(chain, 2)):
            continue
        chains += 1
        ubs = [u for u in ids if all(cposet.holds(c, u) for c in chain)]
        lbs = [l for l in ids if all(cposet.holds(l, c) for c in chain)]
        if not any(all(cposet.holds(u, v) for v in ubs) for u in ubs):
            k1_failures.append({"chain": chain, "missing": "supremum"})
        if not any(all(cposet.holds(v, l) for v in lbs) for l in lbs):
            k1_failures.append({"chain": chain, "missing": "infimum"})

    k2_failures = []
    covering = {}
    for a in ids:
        for b in ids:
            if not strictly(a, b):
                continue
            found = None
            for c in ids:
                if not (cposet.holds(a, c) and cposet.holds(c, b)):
                    continue
                for d in ids:
                    if not (strictly(c, d) and cposet.holds(d, b)):
                        continue
                    if not any(strictly(c, e) and strictly(e, d)
                               for e in ids):
                        found = (c, d)
                        break
                if found:
                    break
            if found is None:
                k2_failures.append({"pair": [a, b]})
            else:
                covering[f"{a} <= {b}"] = list(found)

    return {"K1": "Pass" if not k1_failures else "Fail",
            "K2": "Pass" if not k2_failures else "Fail",
            "details": {"chains_checked": chains,
                        "covering": covering,
                        "K1_failures": k1_failures,
                        "K2_failures": k2_failures}}
