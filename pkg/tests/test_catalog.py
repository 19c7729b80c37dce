"""Catalog oracles: definitional compares, sort keys, supports, classify."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiord.catalog import (EQUIVALENT, GREATER, INF, LESS, ORDERING,
                              VALUATION, ClassifyError, SupportMismatch,
                              ValuationQO, catalog, catalog_by_id, classify,
                              compare, resolve_entry, support_of, trivial_qo)
from quasiord.rings import (INTEGERS, POLY_BI, POLY_UNI, UniverseBounds,
                            enumerate_universe, monomial_ideal,
                            principal_int_ideal, zero_ideal)


def C(ring_alias_id):
    return resolve_entry(ring_alias_id).qo


# --- frozen compare tables ----------------------------------------------------

def test_v2_compare_table_frozen():
    # computed independently from prime factorizations before implementation
    v2 = C("Z:vp:2")
    table = {(2, 3): LESS, (3, 2): GREATER, (0, 1): LESS, (1, 0): GREATER,
             (4, 2): LESS, (2, 6): EQUIVALENT, (1, 3): EQUIVALENT,
             (0, 0): EQUIVALENT, (8, -8): EQUIVALENT, (-4, 2): LESS}
    for (x, y), want in table.items():
        assert compare(v2, x, y) == want, (x, y)


def test_bivariate_valuations_compare():
    v, w, u = C("QXY:v"), C("QXY:w"), C("QXY:u")
    x, y, one, zero = (POLY_BI.var("X"), POLY_BI.var("Y"),
                       POLY_BI.one(), POLY_BI.zero())
    assert compare(v, x, one) == LESS
    assert compare(v, y, x) == LESS  # inverse lex puts the Y-exponent first
    assert compare(v, x * x, x) == LESS
    assert compare(w, y, zero) == EQUIVALENT  # Y lies in the support of w
    assert compare(w, y, x) == LESS
    assert compare(u, x, one) == EQUIVALENT  # u ignores X
    assert compare(u, y, x) == LESS
    # the pair separating w from u: a strict w-drop with equal u-values
    assert compare(w, x * x, x) == LESS
    assert compare(u, x * x, x) == EQUIVALENT


def test_value_functions_frozen():
    assert C("Z:vp:2").value_of(12) == (2,)
    assert C("Z:vp:2").value_of(0) == INF
    assert C("QX:vdeg").value_of(POLY_UNI.parse("X^2 + 1")) == (-2,)
    assert C("QX:w").value_of(POLY_UNI.parse("X^2 + X^3")) == (2,)
    f = POLY_BI.parse("X^2*Y + X")
    assert C("QXY:v").value_of(f) == (0, 1)  # least pair (1,0), encoded (j,i)
    assert C("QXY:v").show_value((0, 1)) == "(1,0)"
    assert C("QXY:w").value_of(f) == (1,)
    assert C("QXY:w").value_of(POLY_BI.parse("X*Y")) == INF
    assert C("QXY:u").value_of(f) == (0,)


def test_univariate_cones_compare():
    pa, pna = C("QX:Pa"), C("QX:Pna")
    x, one, zero = POLY_UNI.var("X"), POLY_UNI.one(), POLY_UNI.zero()
    # lowest-coefficient cone: X is a positive infinitesimal
    assert compare(pa, zero, x) == LESS
    assert compare(pa, x, one) == LESS
    assert compare(pa, x * x, x) == LESS
    # leading-coefficient cone: X is positive infinite
    assert compare(pna, zero, x) == LESS
    assert compare(pna, one, x) == LESS
    assert compare(pna, x, x * x) == LESS
    # the two cones agree on constants
    for c in (-2, -1, 1, 2):
        k = POLY_UNI.const(c)
        assert compare(pa, zero, k) == compare(pna, zero, k)


def test_eval_at_zero_ordering():
    e = C("QX:eval0")
    x, one, zero = POLY_UNI.var("X"), POLY_UNI.one(), POLY_UNI.zero()
    assert compare(e, x, zero) == EQUIVALENT  # support is (X)
    assert compare(e, x + one, one) == EQUIVALENT
    assert compare(e, x - one, zero) == LESS
    assert compare(e, POLY_UNI.parse("X^2 + 2"), one) == GREATER


def test_trivial_qo_two_classes():
    t0 = C("Z:triv:0")
    assert compare(t0, 2, 3) == EQUIVALENT
    assert compare(t0, 0, 5) == LESS
    assert compare(t0, -7, 0) == GREATER
    t2 = C("Z:triv:2")
    assert compare(t2, 4, 0) == EQUIVALENT
    assert compare(t2, 4, 3) == LESS


def test_lemma_witness_pair_values():
    # f = X^2, g = X separates w from u on the bivariate ring
    w, u = C("QXY:w"), C("QXY:u")
    f = POLY_BI.parse("X^2")
    g = POLY_BI.parse("X")
    assert w.value_of(f) == (2,) and w.value_of(g) == (1,)
    assert u.value_of(f) == (0,) and u.value_of(g) == (0,)
    assert compare(w, f, g) == LESS and compare(u, f, g) == EQUIVALENT


# --- classification -----------------------------------------------------------

def test_classify_matrix():
    expected = {
        "Z:leq": ORDERING, "Z:vp:2": VALUATION, "Z:vp:5": VALUATION,
        "Z:triv:0": VALUATION, "Z:triv:2": VALUATION,
        "QX:Pa": ORDERING, "QX:Pna": ORDERING, "QX:eval0": ORDERING,
        "QX:vdeg": VALUATION, "QX:w": VALUATION,
        "QXY:v": VALUATION, "QXY:w": VALUATION, "QXY:u": VALUATION,
        "QXY:triv:XY": VALUATION,
    }
    for qo_id, kind in expected.items():
        qo = C(qo_id)
        assert classify(qo) == kind
        assert qo.declared_kind == kind


def test_classify_rejects_degenerate():
    # a "valuation" sending everything to infinity puts -1 in the support
    broken = ValuationQO(
        "broken", INTEGERS, zero_ideal(INTEGERS), "degenerate",
        lambda x: INF, lambda v: "0", {})
    with pytest.raises(ClassifyError):
        classify(broken)


# --- supports -----------------------------------------------------------------

def test_supports_match_declarations(z_universe, qx_universe, qxy_universe):
    unis = {"Z": z_universe, "QX": qx_universe, "QXY": qxy_universe}
    for ring in (INTEGERS, POLY_UNI, POLY_BI):
        for entry in catalog(ring):
            members, ideal = support_of(entry.qo, unis[ring.alias])
            assert ideal.is_prime
            assert entry.qo.ring.zero() in members


def test_support_sizes_frozen(qxy_universe):
    members, _ = support_of(C("QXY:w"), qxy_universe)
    # multiples of Y in the default bivariate universe: 6 admissible
    # exponent pairs, so 6*2 single-term + C(6,2)*4 two-term + zero = 73
    assert len(members) == 73
    members0, _ = support_of(C("QXY:v"), qxy_universe)
    assert members0 == {POLY_BI.zero()}


def test_support_mismatch_detected(z_universe):
    lying = ValuationQO(
        "lying", INTEGERS, principal_int_ideal(2),
        "claims support (2) but computes support (0)",
        lambda x: INF if x == 0 else (0,), lambda v: "0", {})
    with pytest.raises(SupportMismatch):
        support_of(lying, z_universe)


# --- keys realize compares (dual route) ----------------------------------------

def _universe_for(ring):
    if ring is INTEGERS:
        return enumerate_universe(ring, UniverseBounds(B=6))
    if ring is POLY_UNI:
        return enumerate_universe(ring, UniverseBounds(D=2, T=2, C=(-1, 1)))
    return enumerate_universe(ring, UniverseBounds(D=1, T=2, C=(-1, 1)))


def _cmp_tuple(a, b):
    return LESS if a < b else (EQUIVALENT if a == b else GREATER)


@pytest.mark.parametrize("ring", [INTEGERS, POLY_UNI, POLY_BI],
                         ids=lambda r: r.alias)
def test_sort_key_agrees_with_compare(ring):
    uni = _universe_for(ring)
    for entry in catalog(ring):
        qo = entry.qo
        ctx = qo.key_context(uni.elements)
        keys = {x: qo.sort_key(x, ctx) for x in uni}
        for x in uni:
            for y in uni:
                assert compare(qo, x, y) == _cmp_tuple(keys[x], keys[y]), \
                    (entry.id, ring.show(x), ring.show(y))


@settings(max_examples=200)
@given(st.integers(-300, 300), st.integers(-300, 300))
def test_v3_compare_matches_independent_rule(x, y):
    # dual route: definitional compare vs direct divisibility counting
    def v3(n):
        if n == 0:
            return None
        k, n = 0, abs(n)
        while n % 3 == 0:
            n //= 3
            k += 1
        return k
    v = C("Z:vp:3")
    vx, vy = v3(x), v3(y)
    if vx is None and vy is None:
        want = EQUIVALENT
    elif vx is None:
        want = LESS
    elif vy is None:
        want = GREATER
    else:
        want = _cmp_tuple(vy, vx)
    assert compare(v, x, y) == want


# --- catalog shape --------------------------------------------------------------

def test_catalog_ids_frozen():
    assert [e.id for e in catalog(INTEGERS)] == [
        "Z:leq", "Z:vp:2", "Z:vp:3", "Z:vp:5",
        "Z:triv:0", "Z:triv:2", "Z:triv:3", "Z:triv:5"]
    assert [e.id for e in catalog(POLY_UNI)] == [
        "QX:Pa", "QX:Pna", "QX:vdeg", "QX:w", "QX:eval0",
        "QX:triv:0", "QX:triv:X"]
    assert [e.id for e in catalog(POLY_BI)] == [
        "QXY:v", "QXY:w", "QXY:u",
        "QXY:triv:0", "QXY:triv:Y", "QXY:triv:XY"]


def test_catalog_prime_bound():
    ids = [e.id for e in catalog(INTEGERS, prime_bound=11)]
    assert "Z:vp:11" in ids and "Z:triv:11" in ids


def test_resolve_entry():
    assert resolve_entry("Z:vp:13").qo.value_of(26) == (1,)
    with pytest.raises(KeyError):
        resolve_entry("Z:vp:999")  # not prime-indexed within the bound
    with pytest.raises(KeyError):
        resolve_entry("QQ:nope")


def test_declared_facts_reference_real_entries():
    for ring in (INTEGERS, POLY_UNI, POLY_BI):
        ids = set(catalog_by_id(ring))
        for entry in catalog(ring):
            for other in entry.facts:
                assert other in ids, (entry.id, other)
            if not entry.qo.is_trivial():
                # everything non-trivial declares its trivial coarsening
                assert any(o.startswith(f"{ring.alias}:triv:")
                           for o in entry.facts), entry.id


def test_trivial_flag():
    assert C("QX:triv:0").is_trivial()
    assert not C("QX:w").is_trivial()
