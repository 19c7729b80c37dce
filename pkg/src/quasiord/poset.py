"""Coarsening relations between quasi-orderings.

q is a coarsening of p (written p <= q) when every comparison made inside
the nonnegative part of p survives into q: 0 <=_p x <=_p y implies
x <=_q y.  For valuation-kind p the positivity restriction is vacuous
because the support is the least class; for orderings it excises the
negative half, where the relation genuinely reverses under coarsening.

Decisions are exhaustive over a finite universe and therefore one-sided: a
found counterexample refutes a coarsening outright, a clean sweep only
reports NotRefuted with the number of pairs checked.  A clean sweep is
upgraded to Verified exactly when a structural rule applies (reflexivity)
or the catalog declares the coarsening with a citation; declared facts
never bypass the search.

The same-support members of a sound catalog arrange into trees with the
trivial quasi-ordering at the root, and the full poset generally has
several maximal elements; build_poset treats a universe too small to
separate two members (an antisymmetry violation) as a hard error rather
than reporting a merged poset.
"""

from __future__ import annotations

import numpy as np

from .catalog import GREATER, trivial_qo
from .verifier import EngineError

REFUTED = "Refuted"
NOT_REFUTED = "NotRefuted"
VERIFIED = "Verified"


class UnsoundUniverseError(Exception):
    """The universe cannot separate two distinct quasi-orderings."""


class Decision:
    """Outcome of one coarsening question p <= q."""

    def __init__(self, status, p_id, q_id, witness=None, pairs_checked=0,
                 universe_desc=None, rule=None, citation=None):
        self.status = status
        self.p_id = p_id
        self.q_id = q_id
        self.witness = witness
        self.pairs_checked = int(pairs_checked)
        self.universe_desc = universe_desc
        self.rule = rule
        self.citation = citation

    @property
    def holds(self):
        return self.status != REFUTED

    def to_dict(self):
        d = {"p": self.p_id, "q": self.q_id, "status": self.status,
             "pairs_checked": self.pairs_checked}
        if self.universe_desc is not None:
            d["universe"] = self.universe_desc
        if self.witness is not None:
            d["witness"] = self.witness
        if self.rule is not None:
            d["rule"] = self.rule
        if self.citation is not None:
            d["citation"] = self.citation
        return d

    def __repr__(self):
        return f"Decision({self.p_id} <= {self.q_id}: {self.status})"


def _leq_matrix(qo, universe):
    els = universe.elements
    n = len(els)
    leq = np.zeros((n, n), dtype=bool)
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            leq[i, j] = qo.compare(x, y) != GREATER
    return leq


def _decide(p, q, universe, lp, lq):
    els = universe.elements
    iz = universe.index[p.ring.zero()]
    hyp = lp[iz][:, None] & lp
    viol = hyp & ~lq
    checked = int(hyp.sum(dtype=np.int64))
    if viol.any():
        i, j = map(int, np.argwhere(viol)[0])
        wit = {"x": p.ring.show(els[i]), "y": p.ring.show(els[j])}
        return Decision(REFUTED, p.id, q.id, witness=wit,
                        pairs_checked=checked,
                        universe_desc=universe.describe())
    return Decision(NOT_REFUTED, p.id, q.id, pairs_checked=checked,
                    universe_desc=universe.describe())


def coarsens(p, q, universe):
    """Exhaustive search for a pair refuting p <= q."""
    if p.ring is not q.ring or p.ring is not universe.ring:
        raise ValueError("coarsening needs both oracles on the universe ring")
    return _decide(p, q, universe, _leq_matrix(p, universe),
                   _leq_matrix(q, universe))


def validate_coarsening_witness(p, q, x, y):
    """True when (x, y) refutes p <= q: 0 <=_p x <=_p y but not x <=_q y.

    Runs on raw oracle calls so a reported witness can be rechecked without
    any engine state.
    """
    zero = p.ring.zero()
    return (p.compare(zero, x) != GREATER
            and p.compare(x, y) != GREATER
            and q.compare(x, y) == GREATER)


def positivity_transfer(p, q, universe):
    """Direct check of the corollary: 0 <=_p x implies 0 <=_q x.

    A consequence of p <= q (take the pair (0, x)), checked on its own
    route rather than read off the pair search.
    """
    zero = p.ring.zero()
    checked = 0
    for x in universe.elements:
        if p.compare(zero, x) == GREATER:
            continue
        checked += 1
        if q.compare(zero, x) == GREATER:
            wit = {"x": p.ring.show(x)}
            return Decision(REFUTED, p.id, q.id, witness=wit,
                            pairs_checked=checked,
                            universe_desc=universe.describe())
    return Decision(NOT_REFUTED, p.id, q.id, pairs_checked=checked,
                    universe_desc=universe.describe())


def compare_entries(ep, eq, universe, lp=None, lq=None):
    """Decide ep <= eq, upgrading a clean search by rule or declared fact."""
    lp = _leq_matrix(ep.qo, universe) if lp is None else lp
    lq = _leq_matrix(eq.qo, universe) if lq is None else lq
    dec = _decide(ep.qo, eq.qo, universe, lp, lq)
    if dec.status != NOT_REFUTED:
        return dec
    if ep.id == eq.id:
        dec.status = VERIFIED
        dec.rule = "reflexivity"
        dec.citation = "a quasi-ordering coarsens itself"
    elif eq.id in ep.facts:
        dec.status = VERIFIED
        dec.rule = "declared-fact"
        dec.citation = ep.facts[eq.id]
    return dec


class CoarseningPoset:
    def __init__(self, entries, universe, decisions):
        self.entries = list(entries)
        self.ids = [e.id for e in self.entries]
        self.universe = universe
        self.decisions = decisions

    def holds(self, p_id, q_id):
        return self.decisions[(p_id, q_id)].holds

    def strictly_below(self, p_id, q_id):
        return p_id != q_id and self.holds(p_id, q_id)

    def hasse_edges(self):
        edges = []
        for p in self.ids:
            for q in self.ids:
                if not self.strictly_below(p, q):
                    continue
                via = any(self.strictly_below(p, r)
                          and self.strictly_below(r, q)
                          for r in self.ids if r not in (p, q))
                if not via:
                    edges.append((p, q))
        return edges

    def maximal_ids(self):
        return [p for p in self.ids
                if not any(self.strictly_below(p, q) for q in self.ids)]

    def to_dict(self):
        return {
            "universe": self.universe.describe(),
            "members": self.ids,
            "decisions": [self.decisions[(p, q)].to_dict()
                          for p in self.ids for q in self.ids],
            "hasse_edges": [list(e) for e in self.hasse_edges()],
            "maximal": self.maximal_ids(),
        }


def build_poset(entries, universe):
    """Decide all ordered pairs; a mutual coarsening between distinct
    members means the universe cannot separate them and is a hard error."""
    mats = {e.id: _leq_matrix(e.qo, universe) for e in entries}
    decisions = {}
    for ep in entries:
        for eq in entries:
            decisions[(ep.id, eq.id)] = compare_entries(
                ep, eq, universe, lp=mats[ep.id], lq=mats[eq.id])
    for ep in entries:
        for eq in entries:
            if ep.id == eq.id:
                continue
            if decisions[(ep.id, eq.id)].holds \
                    and decisions[(eq.id, ep.id)].holds:
                raise UnsoundUniverseError(
                    f"{ep.id} and {eq.id} coarsen each other on "
                    f"{universe.describe()}; the universe is too small to "
                    f"separate them")
    return CoarseningPoset(entries, universe, decisions)


def no_global_maximum_demo(poset):
    """Two maximal members with the refutations separating them, or None
    when the poset does have a single maximum."""
    tops = poset.maximal_ids()
    if len(tops) < 2:
        return None
    a, b = tops[0], tops[1]
    return {
        "maximal": tops,
        "refutations": {
            f"{a} <= {b}": poset.decisions[(a, b)].to_dict(),
            f"{b} <= {a}": poset.decisions[(b, a)].to_dict(),
        },
    }


# ---------------------------------------------------------------------------
# fixed-support trees and the forest over a whole catalog
# ---------------------------------------------------------------------------

class TreeReport:
    def __init__(self, support, members, root, parent, violations,
                 universe_desc):
        self.support = support
        self.members = members
        self.root = root
        self.parent = parent
        self.violations = violations
        self.universe_desc = universe_desc

    @property
    def ok(self):
        return not self.violations

    def edges(self):
        return [(child, up) for child, up in self.parent.items()]

    def to_dict(self):
        return {"support": self.support, "members": self.members,
                "root": self.root,
                "edges": [list(e) for e in self.edges()],
                "ok": self.ok, "violations": self.violations,
                "universe": self.universe_desc}


def check_tree(entries, universe, poset=None):
    """Same-support members must form a tree with the trivial at the root:
    one maximum, and every member's strict coarsenings totally ordered."""
    supports = {e.qo.declared_support.name for e in entries}
    if len(supports) != 1:
        raise ValueError(
            f"tree check needs one shared support, got {sorted(supports)}")
    support = supports.pop()
    if poset is None:
        poset = build_poset(entries, universe)
    ids = [e.id for e in entries]
    by_id = {e.id: e for e in entries}
    violations = []

    ups = {p: [q for q in ids if q != p and poset.holds(p, q)] for p in ids}
    roots = [p for p in ids if not ups[p]]
    if len(roots) != 1:
        violations.append(f"expected one maximum, found {roots}")
        root = None
    else:
        root = roots[0]
        if not by_id[root].qo.is_trivial():
            violations.append(f"maximum {root} is not the trivial member")

    parent = {}
    for p in ids:
        chain = ups[p]
        clean = True
        for a in chain:
            for b in chain:
                if a != b and not poset.holds(a, b) \
                        and not poset.holds(b, a):
                    clean = False
                    violations.append(
                        f"coarsenings of {p} are not a chain: "
                        f"{a} and {b} are incomparable")
        if chain and clean:
            # the parent is the least coarsening, the one below the rest
            parent[p] = max(chain,
                            key=lambda c: sum(poset.holds(c, d)
                                              for d in chain))
    for child, up in parent.items():
        if any(not poset.holds(up, d) for d in ups[child]):
            violations.append(f"no least coarsening above {child}")
    return TreeReport(support, ids, root, parent, violations,
                      universe.describe())


class ForestReport:
    def __init__(self, trees, cross, universe_desc):
        self.trees = trees
        self.cross = cross
        self.universe_desc = universe_desc

    @property
    def ok(self):
        return all(t.ok for t in self.trees)

    def to_dict(self):
        return {"trees": [t.to_dict() for t in self.trees],
                "cross_support": [d.to_dict() for d in self.cross],
                "ok": self.ok, "universe": self.universe_desc}


def forest_partition(entries, universe):
    """Partition by declared support and check each part as a tree; the
    coarsenings that hold across different supports are reported apart."""
    poset = build_poset(entries, universe)
    by_support = {}
    order = []
    for e in entries:
        key = e.qo.declared_support.name
        if key not in order:
            order.append(key)
        by_support.setdefault(key, []).append(e)
    trees = [check_tree(by_support[k], universe, poset=poset) for k in order]
    supp_of = {e.id: e.qo.declared_support.name for e in entries}
    cross = [poset.decisions[(p, q)]
             for p in poset.ids for q in poset.ids
             if p != q and supp_of[p] != supp_of[q]
             and poset.decisions[(p, q)].holds]
    return ForestReport(trees, cross, universe.describe())


# ---------------------------------------------------------------------------
# convexity and its equivalence with coarsening into the trivial member
# ---------------------------------------------------------------------------

def convexity_check(qo, ideal, universe):
    """Is the ideal convex for the quasi-ordering: x in the ideal and
    0 <= y <= x force y into the ideal."""
    zero = qo.ring.zero()
    checked = 0
    for x in universe.elements:
        if not ideal.contains(x):
            continue
        for y in universe.elements:
            if qo.compare(zero, y) == GREATER \
                    or qo.compare(y, x) == GREATER:
                continue
            checked += 1
            if not ideal.contains(y):
                return {"convex": False, "pairs_checked": checked,
                        "witness": {"y": qo.ring.show(y),
                                    "x": qo.ring.show(x)}}
    return {"convex": True, "pairs_checked": checked, "witness": None}


def qcomp_equivalence(qo, ideal, universe):
    """Dual route: the ideal is convex iff the trivial quasi-ordering at
    the ideal coarsens the oracle.  Both routes run independently and must
    agree; a disagreement is an engine defect, not a result."""
    direct = convexity_check(qo, ideal, universe)
    triv = trivial_qo(qo.ring, ideal,
                      f"{qo.ring.alias}:triv:{ideal.name}")
    dec = coarsens(qo, triv, universe)
    if direct["convex"] != dec.holds:
        raise EngineError(
            f"convexity of {ideal.name} under {qo.id} disagrees with the "
            f"coarsening route: direct={direct['convex']} "
            f"coarsening={dec.status}")
    return {"qo": qo.id, "ideal": ideal.name, "convex": direct["convex"],
            "direct": direct, "coarsening": dec.to_dict(),
            "universe": universe.describe()}


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

def poset_dot(poset, title="coarsening"):
    """Hasse diagram in DOT: maxima on top, Verified edges solid,
    NotRefuted edges dashed, members and edges in stable catalog order."""
    lines = [f'digraph "{title}" {{', "  rankdir=BT;",
             '  node [shape=box, fontname="monospace"];']
    for pid in poset.ids:
        lines.append(f'  "{pid}";')
    for lo, hi in poset.hasse_edges():
        style = ("solid" if poset.decisions[(lo, hi)].status == VERIFIED
                 else "dashed")
        lines.append(f'  "{lo}" -> "{hi}" [style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
