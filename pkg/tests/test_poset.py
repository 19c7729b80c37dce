"""Coarsening decisions, fixed-support trees, and the convexity dual route.

Frozen witnesses and counts below were produced by the exhaustive search on
the default universes and cross-checked by hand against the definition:
p <= q iff 0 <=_p x <=_p y always forces x <=_q y.
"""

import pytest

from quasiord import poset, rings
from quasiord.catalog import GREATER, TRIVIAL_FACT, catalog, catalog_by_id
from quasiord.verifier import EngineError

pytestmark = []


@pytest.fixture(scope="module")
def z_poset(z_universe):
    return poset.build_poset(catalog(rings.INTEGERS), z_universe)


@pytest.fixture(scope="module")
def qx_poset(qx_universe):
    return poset.build_poset(catalog(rings.POLY_UNI), qx_universe)


@pytest.fixture(scope="module")
def qxy_poset(qxy_universe):
    return poset.build_poset(catalog(rings.POLY_BI), qxy_universe)


# --- integers: the star at the trivial member --------------------------------

Z_STRICT_HOLDS = [
    ("Z:leq", "Z:triv:0"),
    ("Z:vp:2", "Z:triv:0"), ("Z:vp:2", "Z:triv:2"),
    ("Z:vp:3", "Z:triv:0"), ("Z:vp:3", "Z:triv:3"),
    ("Z:vp:5", "Z:triv:0"), ("Z:vp:5", "Z:triv:5"),
]


def test_integer_star_poset(z_poset):
    strict = sorted((p, q) for p in z_poset.ids for q in z_poset.ids
                    if p != q and z_poset.holds(p, q))
    assert strict == sorted(Z_STRICT_HOLDS)
    assert z_poset.maximal_ids() == ["Z:triv:0", "Z:triv:2",
                                     "Z:triv:3", "Z:triv:5"]
    # star: nothing sits between, so every strict pair is a cover
    assert sorted(z_poset.hasse_edges()) == sorted(Z_STRICT_HOLDS)


def test_integer_witnesses(z_poset):
    expect = {
        ("Z:leq", "Z:vp:2"): {"x": "1", "y": "2"},
        ("Z:leq", "Z:vp:3"): {"x": "1", "y": "3"},
        ("Z:vp:2", "Z:leq"): {"x": "0", "y": "-1"},
        ("Z:vp:2", "Z:vp:3"): {"x": "1", "y": "3"},
        ("Z:vp:3", "Z:vp:2"): {"x": "1", "y": "2"},
        ("Z:leq", "Z:triv:2"): {"x": "1", "y": "2"},
        ("Z:triv:2", "Z:triv:3"): {"x": "1", "y": "3"},
        ("Z:vp:2", "Z:triv:3"): {"x": "1", "y": "3"},
    }
    for pair, wit in expect.items():
        d = z_poset.decisions[pair]
        assert d.status == poset.REFUTED
        assert d.witness == wit


def test_refuted_witnesses_recheck(z_poset, qx_poset):
    for P in (z_poset, qx_poset):
        qos = {e.id: e.qo for e in P.entries}
        for (pid, qid), d in P.decisions.items():
            if d.status != poset.REFUTED:
                continue
            ring = qos[pid].ring
            x = ring.parse(d.witness["x"])
            y = ring.parse(d.witness["y"])
            assert poset.validate_coarsening_witness(qos[pid], qos[qid], x, y)


def test_fact_upgrades_and_reflexivity(z_poset):
    d = z_poset.decisions[("Z:leq", "Z:triv:0")]
    assert d.status == poset.VERIFIED
    assert d.rule == "declared-fact"
    assert d.citation == TRIVIAL_FACT
    # the cross-support coarsening holds but no fact is declared for it
    d = z_poset.decisions[("Z:vp:2", "Z:triv:2")]
    assert d.status == poset.NOT_REFUTED
    d = z_poset.decisions[("Z:leq", "Z:leq")]
    assert d.status == poset.VERIFIED
    assert d.rule == "reflexivity"


def test_pairs_checked_counts_hypothesis_pairs(z_poset, z_universe):
    # independent count of {(x, y): 0 <= x <= y} in the universe
    brute = sum(1 for x in z_universe for y in z_universe if 0 <= x <= y)
    assert z_poset.decisions[("Z:leq", "Z:vp:2")].pairs_checked == brute


def test_coarsens_requires_shared_ring(z_universe):
    by_z = catalog_by_id(rings.INTEGERS)
    by_qx = catalog_by_id(rings.POLY_UNI)
    with pytest.raises(ValueError):
        poset.coarsens(by_z["Z:leq"].qo, by_qx["QX:vdeg"].qo, z_universe)


def test_validate_coarsening_witness(z_universe):
    by = catalog_by_id(rings.INTEGERS)
    leq, v2 = by["Z:leq"].qo, by["Z:vp:2"].qo
    assert poset.validate_coarsening_witness(leq, v2, 1, 2)
    assert not poset.validate_coarsening_witness(leq, v2, 2, 1)
    assert not poset.validate_coarsening_witness(leq, v2, 1, 3)
    assert poset.validate_coarsening_witness(v2, leq, 0, -1)
    # (-2, -1) satisfies -2 <= -1 but fails the positivity hypothesis
    assert not poset.validate_coarsening_witness(leq, v2, -2, -1)


def test_positivity_transfer(z_universe):
    by = catalog_by_id(rings.INTEGERS)
    d = poset.positivity_transfer(by["Z:leq"].qo, by["Z:triv:0"].qo,
                                  z_universe)
    assert d.status == poset.NOT_REFUTED
    assert d.pairs_checked == 9  # 0..8 are the leq-nonnegatives
    d = poset.positivity_transfer(by["Z:triv:0"].qo, by["Z:leq"].qo,
                                  z_universe)
    assert d.status == poset.REFUTED
    assert d.witness == {"x": "-1"}


def test_brute_force_agreement_on_small_universe():
    # the vectorized decision against plain loops over raw oracle calls
    uni = rings.enumerate_universe(rings.INTEGERS, rings.UniverseBounds(B=4))
    ents = catalog(rings.INTEGERS)
    for ep in ents:
        for eq in ents:
            dec = poset.coarsens(ep.qo, eq.qo, uni)
            zero = ep.qo.ring.zero()
            brute = next(
                ((x, y) for x in uni for y in uni
                 if ep.qo.compare(zero, x) != GREATER
                 and ep.qo.compare(x, y) != GREATER
                 and eq.qo.compare(x, y) == GREATER), None)
            assert (dec.status == poset.REFUTED) == (brute is not None)
            if brute is not None:
                ring = ep.qo.ring
                assert dec.witness == {"x": ring.show(brute[0]),
                                       "y": ring.show(brute[1])}


# --- soundness of the universe: separation or hard error ---------------------

def test_integer_tree_at_full_prime_bound():
    ents = catalog(rings.INTEGERS, prime_bound=23)
    uni = rings.enumerate_universe(rings.INTEGERS, rings.UniverseBounds(B=23))
    P = poset.build_poset(ents, uni)
    group = [e for e in ents if e.qo.declared_support.name == "(0)"]
    tr = poset.check_tree(group, uni, poset=P)
    assert tr.ok
    assert tr.root == "Z:triv:0"
    assert len(tr.members) == 11
    assert all(up == "Z:triv:0" for _, up in tr.edges())

    forest = poset.forest_partition(ents, uni)
    assert forest.ok
    assert [t.support for t in forest.trees] == [
        "(0)", "(2)", "(3)", "(5)", "(7)", "(11)", "(13)", "(17)",
        "(19)", "(23)"]
    cross = [(d.p_id, d.q_id) for d in forest.cross]
    assert cross == [(f"Z:vp:{p}", f"Z:triv:{p}")
                     for p in (2, 3, 5, 7, 11, 13, 17, 19, 23)]


def test_undersized_universe_is_a_hard_error():
    # B=12 cannot separate the valuations at primes above 12 from the
    # trivial member, so the poset build must refuse to continue
    ents = catalog(rings.INTEGERS, prime_bound=23)
    uni = rings.enumerate_universe(rings.INTEGERS, rings.UniverseBounds(B=12))
    with pytest.raises(poset.UnsoundUniverseError, match="Z:vp:13"):
        poset.build_poset(ents, uni)


# --- univariate polynomials: two branches below the trivial ------------------

QX_HOLDS = {
    ("QX:Pa", "QX:w"): poset.VERIFIED,
    ("QX:Pa", "QX:eval0"): poset.NOT_REFUTED,
    ("QX:Pa", "QX:triv:0"): poset.VERIFIED,
    ("QX:Pa", "QX:triv:X"): poset.NOT_REFUTED,
    ("QX:Pna", "QX:vdeg"): poset.VERIFIED,
    ("QX:Pna", "QX:triv:0"): poset.VERIFIED,
    ("QX:vdeg", "QX:triv:0"): poset.VERIFIED,
    ("QX:w", "QX:triv:0"): poset.VERIFIED,
    ("QX:w", "QX:triv:X"): poset.NOT_REFUTED,
    ("QX:eval0", "QX:triv:X"): poset.VERIFIED,
}


def test_qx_poset_frozen(qx_poset):
    strict = {(p, q): qx_poset.decisions[(p, q)].status
              for p in qx_poset.ids for q in qx_poset.ids
              if p != q and qx_poset.holds(p, q)}
    assert strict == QX_HOLDS
    assert qx_poset.maximal_ids() == ["QX:triv:0", "QX:triv:X"]
    assert qx_poset.hasse_edges() == [
        ("QX:Pa", "QX:w"), ("QX:Pa", "QX:eval0"),
        ("QX:Pna", "QX:vdeg"),
        ("QX:vdeg", "QX:triv:0"),
        ("QX:w", "QX:triv:0"), ("QX:w", "QX:triv:X"),
        ("QX:eval0", "QX:triv:X"),
    ]


def test_qx_witnesses(qx_poset):
    expect = {
        ("QX:Pna", "QX:w"): {"x": "1", "y": "X"},
        ("QX:Pa", "QX:vdeg"): {"x": "X", "y": "1"},
        ("QX:vdeg", "QX:w"): {"x": "-2", "y": "-2*X"},
        ("QX:w", "QX:vdeg"): {"x": "-2*X", "y": "-2"},
        ("QX:Pa", "QX:Pna"): {"x": "0", "y": "-2*X + 1"},
        ("QX:Pna", "QX:Pa"): {"x": "0", "y": "X - 2"},
        ("QX:eval0", "QX:triv:0"): {"x": "-2*X", "y": "0"},
        ("QX:w", "QX:eval0"): {"x": "0", "y": "-2"},
    }
    for pair, wit in expect.items():
        d = qx_poset.decisions[pair]
        assert d.status == poset.REFUTED
        assert d.witness == wit


def test_qx_tree_branches(qx_poset, qx_universe):
    ents = [e for e in qx_poset.entries
            if e.qo.declared_support.name == "(0)"]
    tr = poset.check_tree(ents, qx_universe, poset=qx_poset)
    assert tr.ok
    assert tr.root == "QX:triv:0"
    # two chains: Pa under w and Pna under vdeg; the computed parent of Pa
    # is w even though the source diagram drew it at the root, which the
    # catalog entry records as a figure note
    assert tr.parent == {"QX:Pa": "QX:w", "QX:Pna": "QX:vdeg",
                         "QX:vdeg": "QX:triv:0", "QX:w": "QX:triv:0"}
    by = catalog_by_id(rings.POLY_UNI)
    assert "figure_note" in by["QX:Pa"].metadata


def test_qx_forest(qx_poset, qx_universe):
    forest = poset.forest_partition(qx_poset.entries, qx_universe)
    assert forest.ok
    assert [t.support for t in forest.trees] == ["(0)", "(X)"]
    assert [t.root for t in forest.trees] == ["QX:triv:0", "QX:triv:X"]
    assert [(d.p_id, d.q_id, d.status) for d in forest.cross] == [
        ("QX:Pa", "QX:eval0", poset.NOT_REFUTED),
        ("QX:Pa", "QX:triv:X", poset.NOT_REFUTED),
        ("QX:w", "QX:triv:X", poset.NOT_REFUTED),
    ]


def test_tree_precondition_and_violation(qx_poset, qx_universe):
    with pytest.raises(ValueError, match="shared support"):
        poset.check_tree(qx_poset.entries, qx_universe)
    # dropping the trivial member leaves vdeg at the top, which the tree
    # check must flag rather than accept
    by = catalog_by_id(rings.POLY_UNI)
    tr = poset.check_tree([by["QX:Pna"], by["QX:vdeg"]], qx_universe)
    assert not tr.ok
    assert any("not the trivial member" in v for v in tr.violations)


# --- bivariate polynomials: a poset with several maxima ----------------------

def test_qxy_poset_frozen(qxy_poset):
    strict = {(p, q): qxy_poset.decisions[(p, q)].status
              for p in qxy_poset.ids for q in qxy_poset.ids
              if p != q and qxy_poset.holds(p, q)}
    assert strict == {
        ("QXY:v", "QXY:w"): poset.VERIFIED,
        ("QXY:v", "QXY:u"): poset.VERIFIED,
        ("QXY:v", "QXY:triv:0"): poset.VERIFIED,
        ("QXY:v", "QXY:triv:Y"): poset.NOT_REFUTED,
        ("QXY:v", "QXY:triv:XY"): poset.NOT_REFUTED,
        ("QXY:u", "QXY:triv:0"): poset.VERIFIED,
        ("QXY:u", "QXY:triv:Y"): poset.NOT_REFUTED,
        ("QXY:w", "QXY:triv:Y"): poset.VERIFIED,
        ("QXY:w", "QXY:triv:XY"): poset.NOT_REFUTED,
    }
    assert qxy_poset.maximal_ids() == ["QXY:triv:0", "QXY:triv:Y",
                                       "QXY:triv:XY"]
    assert qxy_poset.hasse_edges() == [
        ("QXY:v", "QXY:w"), ("QXY:v", "QXY:u"),
        ("QXY:w", "QXY:triv:Y"), ("QXY:w", "QXY:triv:XY"),
        ("QXY:u", "QXY:triv:0"), ("QXY:u", "QXY:triv:Y"),
    ]


def test_qxy_incomparable_refinements(qxy_poset):
    d = qxy_poset.decisions[("QXY:u", "QXY:w")]
    assert d.status == poset.REFUTED
    assert d.witness == {"x": "-1", "y": "-X"}
    d = qxy_poset.decisions[("QXY:w", "QXY:u")]
    assert d.status == poset.REFUTED
    assert d.witness == {"x": "-Y", "y": "0"}


def test_qxy_pinned_witness_pair(qxy_universe):
    # the X-powers separate the two one-variable refinements in both
    # directions: X ~ X^2 for the Y-adic member but not for the X-adic
    # one, and Y ~ Y^2 the other way around
    by = catalog_by_id(rings.POLY_BI)
    u, w = by["QXY:u"].qo, by["QXY:w"].qo
    R = rings.POLY_BI
    X, Y = R.var("X"), R.var("Y")
    X2, Y2 = R.mul(X, X), R.mul(Y, Y)
    assert poset.validate_coarsening_witness(u, w, X, X2)
    assert poset.validate_coarsening_witness(w, u, Y, Y2)
    assert not poset.validate_coarsening_witness(w, u, X, X2)
    assert w.value_of(X) == (1,) and w.value_of(X2) == (2,)
    assert u.value_of(X) == (0,) and u.value_of(X2) == (0,)
    assert u.value_of(Y) == (1,) and u.value_of(Y2) == (2,)


def test_qxy_diamond_demo(qxy_universe):
    by = catalog_by_id(rings.POLY_BI)
    ents = [by[i] for i in ("QXY:v", "QXY:w", "QXY:u",
                            "QXY:triv:0", "QXY:triv:Y")]
    P = poset.build_poset(ents, qxy_universe)
    assert P.maximal_ids() == ["QXY:triv:0", "QXY:triv:Y"]
    assert P.hasse_edges() == [
        ("QXY:v", "QXY:w"), ("QXY:v", "QXY:u"),
        ("QXY:w", "QXY:triv:Y"),
        ("QXY:u", "QXY:triv:0"), ("QXY:u", "QXY:triv:Y"),
    ]
    demo = poset.no_global_maximum_demo(P)
    assert demo["maximal"] == ["QXY:triv:0", "QXY:triv:Y"]
    refs = demo["refutations"]
    assert refs["QXY:triv:0 <= QXY:triv:Y"]["witness"] == {
        "x": "-1", "y": "-Y"}
    assert refs["QXY:triv:Y <= QXY:triv:0"]["witness"] == {
        "x": "-Y", "y": "0"}


def test_single_maximum_has_no_demo(z_universe):
    by = catalog_by_id(rings.INTEGERS)
    ents = [by[i] for i in ("Z:leq", "Z:vp:2", "Z:triv:0")]
    P = poset.build_poset(ents, z_universe)
    assert poset.no_global_maximum_demo(P) is None


def test_qxy_forest(qxy_poset, qxy_universe):
    forest = poset.forest_partition(qxy_poset.entries, qxy_universe)
    assert forest.ok
    assert [(t.support, t.root) for t in forest.trees] == [
        ("(0)", "QXY:triv:0"), ("(Y)", "QXY:triv:Y"),
        ("(X,Y)", "QXY:triv:XY")]
    assert [(d.p_id, d.q_id, d.status) for d in forest.cross] == [
        ("QXY:v", "QXY:w", poset.VERIFIED),
        ("QXY:v", "QXY:triv:Y", poset.NOT_REFUTED),
        ("QXY:v", "QXY:triv:XY", poset.NOT_REFUTED),
        ("QXY:w", "QXY:triv:XY", poset.NOT_REFUTED),
        ("QXY:u", "QXY:triv:Y", poset.NOT_REFUTED),
    ]


# --- convexity and the trivial-coarsening equivalence ------------------------

def test_qcomp_padic_not_convex(z_universe):
    by = catalog_by_id(rings.INTEGERS)
    r = poset.qcomp_equivalence(by["Z:vp:2"].qo,
                                rings.principal_int_ideal(3), z_universe)
    assert not r["convex"]
    assert r["direct"]["witness"] == {"y": "1", "x": "3"}
    assert r["coarsening"]["status"] == poset.REFUTED
    assert r["coarsening"]["witness"] == {"x": "1", "y": "3"}


def test_qcomp_infinitesimal_ideal_is_convex(qx_universe):
    by = catalog_by_id(rings.POLY_UNI)
    ideal = rings.monomial_ideal(rings.POLY_UNI, ["X"])
    r = poset.qcomp_equivalence(by["QX:Pa"].qo, ideal, qx_universe)
    assert r["convex"]
    assert r["direct"]["pairs_checked"] == 496
    assert r["coarsening"]["status"] == poset.NOT_REFUTED
    # under the other ordering X is infinitely large, so (X) is not convex
    r = poset.qcomp_equivalence(by["QX:Pna"].qo, ideal, qx_universe)
    assert not r["convex"]
    assert r["direct"]["witness"] == {"y": "1", "x": "X"}


def test_qcomp_support_cannot_shrink(qx_universe):
    by = catalog_by_id(rings.POLY_UNI)
    r = poset.qcomp_equivalence(by["QX:eval0"].qo,
                                rings.zero_ideal(rings.POLY_UNI), qx_universe)
    assert not r["convex"]
    assert r["direct"]["witness"] == {"y": "-2*X", "x": "0"}
    assert r["coarsening"]["witness"] == {"x": "-2*X", "y": "0"}


# --- DOT export ---------------------------------------------------------------

def test_dot_export(qxy_poset):
    dot = poset.poset_dot(qxy_poset, title="QXY coarsening")
    lines = dot.splitlines()
    assert lines[0] == 'digraph "QXY coarsening" {'
    assert "  rankdir=BT;" in lines
    assert '  "QXY:v" -> "QXY:w" [style=solid];' in lines
    assert '  "QXY:w" -> "QXY:triv:XY" [style=dashed];' in lines
    assert '  "QXY:u" -> "QXY:triv:Y" [style=dashed];' in lines
    # stable: members in catalog order before any edge
    nodes = [ln for ln in lines if ln.endswith('";')]
    assert nodes == [f'  "{i}";' for i in qxy_poset.ids]
    assert poset.poset_dot(qxy_poset, title="QXY coarsening") == dot


def test_decision_dict_shape(z_poset):
    d = z_poset.decisions[("Z:leq", "Z:vp:2")].to_dict()
    assert d["p"] == "Z:leq" and d["q"] == "Z:vp:2"
    assert d["status"] == poset.REFUTED
    assert d["witness"] == {"x": "1", "y": "2"}
    assert d["pairs_checked"] == 45
    assert d["universe"]["ring"] == "Z"
    v = z_poset.decisions[("Z:leq", "Z:triv:0")].to_dict()
    assert v["rule"] == "declared-fact"
    assert "witness" not in v
