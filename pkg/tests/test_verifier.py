"""Verification engine tests: scan/naive cross-validation, kernel backend
bit-identity, value-semigroup extraction, mutation controls, and witness
rechecking."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiord import _kernels
from quasiord.catalog import (GREATER, ORDERING, VALUATION, QuasiOrder,
                              catalog, classify, resolve_entry)
from quasiord.rings import (INTEGERS, POLY_BI, POLY_UNI, UniverseBounds,
                            enumerate_universe, zero_ideal)
from quasiord.verifier import (EngineError, ExtractionError,
                               KindPreconditionError, check_derived_lemmas,
                               check_ordering_axioms, check_qr_axioms,
                               extract_valuation, mutation_suite,
                               recheck_witness, standard_mutants,
                               swap_mutant, transitivity_break_mutant)

BACKENDS = ["numpy", "pure"] + (["numba"] if _kernels.HAS_NUMBA else [])


@pytest.fixture(scope="module")
def z_small():
    return enumerate_universe(INTEGERS, UniverseBounds(B=6))


@pytest.fixture(scope="module")
def qx_small():
    return enumerate_universe(POLY_UNI, UniverseBounds(D=1, T=2, C=(-1, 1)))


@pytest.fixture(scope="module")
def qxy_small():
    return enumerate_universe(POLY_BI, UniverseBounds(D=1, T=1, C=(-1, 1)))


def _signature(report):
    # ops may differ between strategies; verdicts and covered counts may not
    return [(o.axiom, o.status, o.covered) for o in report.outcomes]


# ---------------------------------------------------------------------------
# scan vs naive cross-validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("ring_id", ["Z", "QX", "QXY"])
def test_scan_matches_naive_on_catalog(ring_id, z_small, qx_small, qxy_small):
    uni = {"Z": z_small, "QX": qx_small, "QXY": qxy_small}[ring_id]
    for entry in catalog(uni.ring):
        scan = check_qr_axioms(entry.qo, uni, strategy="scan")
        naive = check_qr_axioms(entry.qo, uni, strategy="naive")
        assert scan.passed and naive.passed, entry.qo.id
        assert _signature(scan) == _signature(naive), entry.qo.id
        assert scan.strategy == "scan" and naive.strategy == "naive"


def test_ordering_scan_matches_naive(z_small, qx_small):
    for qid, uni in (("Z:leq", z_small), ("QX:Pa", qx_small),
                     ("QX:Pna", qx_small)):
        qo = resolve_entry(qid).qo
        scan = check_ordering_axioms(qo, uni)
        naive = check_ordering_axioms(qo, uni, strategy="naive")
        assert scan.passed and naive.passed, qid
        assert _signature(scan) == _signature(naive), qid


def test_mutants_scan_matches_naive(z_small):
    # mutants have no sort keys, so scan runs in compare-call oracle mode;
    # verdicts and covered counts must still agree with the literal loops
    for base_id in ("Z:leq", "Z:vp:2"):
        base = resolve_entry(base_id).qo
        for mut in standard_mutants(base, z_small):
            scan = check_qr_axioms(mut, z_small)
            naive = check_qr_axioms(mut, z_small, strategy="naive")
            assert ([(o.axiom, o.status) for o in scan.outcomes]
                    == [(o.axiom, o.status) for o in naive.outcomes]), mut.id
            for o_s, o_n in zip(scan.outcomes, naive.outcomes):
                if o_s.status != "Skipped":
                    assert o_s.covered == o_n.covered, (mut.id, o_s.axiom)
            for rep in (scan, naive):
                for out in rep.failures:
                    assert recheck_witness(mut, out.axiom, out.witness), \
                        (mut.id, rep.strategy, out.axiom, out.witness)


def test_unknown_strategy_rejected(z_small):
    with pytest.raises(ValueError):
        check_qr_axioms(resolve_entry("Z:leq").qo, z_small, strategy="fast")


# ---------------------------------------------------------------------------
# kernel backends are bit-identical, including which witness comes first
# ---------------------------------------------------------------------------

def test_backends_bit_identical_reports(monkeypatch, z_small, qx_small):
    base = resolve_entry("Z:leq").qo
    broken = transitivity_break_mutant(base, z_small)
    swapped = swap_mutant(base)
    runs = {}
    for mode in BACKENDS:
        monkeypatch.setenv("QUASIORD_KERNELS", mode)
        dicts = []
        for qid in ("Z:leq", "Z:vp:2"):
            dicts.append(check_qr_axioms(resolve_entry(qid).qo,
                                         z_small).to_dict())
        for qid in ("QX:Pa", "QX:vdeg"):
            dicts.append(check_qr_axioms(resolve_entry(qid).qo,
                                         qx_small).to_dict())
        dicts.append(check_ordering_axioms(resolve_entry("QX:Pa").qo,
                                           qx_small).to_dict())
        dicts.append(check_qr_axioms(broken, z_small).to_dict())
        dicts.append(check_qr_axioms(swapped, z_small).to_dict())
        runs[mode] = dicts
    ref = runs[BACKENDS[0]]
    for mode in BACKENDS[1:]:
        assert runs[mode] == ref


def test_backend_selection(monkeypatch):
    monkeypatch.delenv("QUASIORD_KERNELS", raising=False)
    assert _kernels.backend() == ("numba" if _kernels.HAS_NUMBA else "numpy")
    assert _kernels.backend("pure") == "pure"
    monkeypatch.setenv("QUASIORD_KERNELS", "numpy")
    assert _kernels.backend() == "numpy"
    monkeypatch.setenv("QUASIORD_KERNELS", "typo")
    with pytest.raises(ValueError):
        _kernels.backend()


def test_missing_numba_is_an_error_not_a_silent_fallback(monkeypatch):
    monkeypatch.delenv("QUASIORD_KERNELS", raising=False)
    monkeypatch.setattr(_kernels, "HAS_NUMBA", False)
    with pytest.raises(RuntimeError):
        _kernels.backend("numba")
    assert _kernels.backend() == "numpy"


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_first_trans_violation_backends_and_reference(data):
    n = data.draw(st.integers(2, 12))
    bits = data.draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    leq = np.array(bits, dtype=bool).reshape(n, n)
    np.fill_diagonal(leq, True)
    got = [_kernels.first_trans_violation(leq, override=m) for m in BACKENDS]
    ref = None
    for i in range(n):
        for j in range(n):
            if not leq[i, j]:
                continue
            for k in range(n):
                if leq[j, k] and not leq[i, k]:
                    ref = (i, j, k)
                    break
            if ref:
                break
        if ref:
            break
    assert all(g == ref for g in got)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_scan_mult_backends_and_reference(data):
    n = data.draw(st.integers(2, 10))
    m = data.draw(st.integers(1, 6))
    base = np.array(data.draw(st.lists(st.integers(0, 4), min_size=n,
                                       max_size=n)), dtype=np.int32)
    trip = np.array(data.draw(st.lists(st.integers(0, 6), min_size=m * n,
                                       max_size=m * n)),
                    dtype=np.int32).reshape(m, n)
    order = np.array(sorted(range(n), key=lambda i: (base[i], i)),
                     dtype=np.int32)
    for strict in (False, True):
        got = [_kernels.scan_mult_consecutive(trip, order, base, strict,
                                              override=b) for b in BACKENDS]
        ref = None
        for r in range(m):
            for t in range(n - 1):
                a, b = int(trip[r, order[t]]), int(trip[r, order[t + 1]])
                tie = base[order[t]] == base[order[t + 1]]
                if strict:
                    bad = (not tie) and a >= b
                else:
                    bad = (a != b) if tie else (a > b)
                if bad:
                    ref = (r, t)
                    break
            if ref:
                break
        assert all(g == ref for g in got), strict


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_scan_add_backends_agree(data):
    n = data.draw(st.integers(2, 9))
    base = np.array(data.draw(st.lists(st.integers(0, 3), min_size=n,
                                       max_size=n)), dtype=np.int32)
    srank = np.array(data.draw(st.lists(st.integers(0, 5), min_size=n * n,
                                        max_size=n * n)),
                     dtype=np.int32).reshape(n, n)
    order = np.array(sorted(range(n), key=lambda i: (base[i], i)),
                     dtype=np.int32)
    for distinct in (True, False):
        got = [_kernels.scan_add_prefix(srank, order, base, distinct,
                                        override=b) for b in BACKENDS]
        assert all(g == got[0] for g in got), distinct


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=1, max_size=12),
                min_size=1, max_size=5))
def test_leq_pair_counts_backends_and_reference(rows):
    width = min(len(r) for r in rows)
    mat = np.array([r[:width] for r in rows], dtype=np.int32)
    got = [_kernels.leq_pair_counts(mat, override=b) for b in BACKENDS]
    ref = np.array([sum(1 for a in row for b in row if a <= b)
                    for row in mat.tolist()], dtype=np.int64)
    for g in got:
        assert np.array_equal(g, ref)


# ---------------------------------------------------------------------------
# value-semigroup extraction
# ---------------------------------------------------------------------------

def test_value_table_degree_valuation():
    uni = enumerate_universe(POLY_UNI, UniverseBounds(D=2, T=2, C=(-1, 1)))
    table = extract_valuation(resolve_entry("QX:vdeg").qo, uni)
    assert table.n_base == 3
    # classes form by first member, so enumeration yields degrees 0, 1, 2
    assert [cls[0].degree() for cls in table.classes] == [0, 1, 2]
    # least value first: the degree-2 class has value -2
    assert table.value_order == [2, 1, 0]
    assert table.addition[(1, 1)] == 2
    assert table.addition[(0, 0)] == 0
    assert table.neutral == 0
    assert len(table.infinity) == 1
    # X^2 * X^2 leaves the universe: one extension class of degree 4
    ext = table.addition[(2, 2)]
    assert ext >= table.n_base
    assert table.ext_classes[ext - table.n_base][0].degree() == 4


def test_value_table_trivial_single_class(z_small):
    table = extract_valuation(resolve_entry("Z:triv:0").qo, z_small)
    assert table.n_base == 1
    assert table.value_order == [0]
    assert table.addition == {(0, 0): 0}
    assert table.neutral == 0
    assert len(table.infinity) == 1


def test_value_table_bivariate_products(qxy_small):
    table = extract_valuation(resolve_entry("QXY:v").qo, qxy_small)
    # the classes of 1, Y, X and X*Y are pairwise distinct
    assert table.n_base == 4
    idx = {}
    for name in ("1", "X", "Y", "X*Y"):
        el = POLY_BI.parse(name)
        hits = [ci for ci, cls in enumerate(table.classes) if el in cls]
        assert len(hits) == 1, name
        idx[name] = hits[0]
    assert len(set(idx.values())) == 4
    # invlex puts (0,0) < (1,0) < (0,1) < (1,1)
    assert table.value_order == [idx["1"], idx["X"], idx["Y"], idx["X*Y"]]
    assert table.addition[(idx["X"], idx["Y"])] == idx["X*Y"]
    assert table.addition[(idx["Y"], idx["X"])] == idx["X*Y"]
    # X*X leaves the D=1 universe and lands in an extension class
    assert table.addition[(idx["X"], idx["X"])] >= table.n_base


def test_value_table_padic(z_small):
    table = extract_valuation(resolve_entry("Z:vp:2").qo, z_small)
    # B=6 splits into odd, 2*odd and 4*odd classes
    assert table.n_base == 3
    assert table.value_order == [0, 1, 2]
    assert table.addition[(1, 1)] == 2
    assert table.addition[(0, 1)] == 1 and table.addition[(1, 0)] == 1
    assert sorted(abs(x) for x in table.classes[2]) == [4, 4]
    n = len(z_small.elements)
    assert table.counters["round_trip_pairs"] == n * n
    # the oracle publishes its value map, so the dual route must have run
    assert table.counters["value_map_pairs"] == 9
    d = table.to_dict(INTEGERS.show)
    assert d["addition"]["1,1"] == 2
    assert d["infinity_class_size"] == 1
    assert d == extract_valuation(resolve_entry("Z:vp:2").qo,
                                  z_small).to_dict(INTEGERS.show)


def test_extraction_rejects_ordering(qx_small):
    with pytest.raises(KindPreconditionError):
        extract_valuation(resolve_entry("QX:Pa").qo, qx_small)


def test_extraction_rejects_swapped_valuation(z_small):
    # swapping Less/Greater flips the dichotomy probe to ordering-kind
    mut = swap_mutant(resolve_entry("Z:vp:2").qo)
    with pytest.raises(KindPreconditionError):
        extract_valuation(mut, z_small)


class _SixLooksLikeFour(QuasiOrder):
    """2-adic oracle corrupted so 6 compares like 4: still a total
    preorder, but [2]+[class of 6's true peers] is no longer well defined."""

    def __init__(self, base):
        super().__init__(base.id + "#wd-break", base.ring,
                         base.declared_kind, base.declared_support,
                         "test corruption")
        self._base = base

    def compare(self, x, y):
        px = 4 if x == 6 else x
        py = 4 if y == 6 else y
        return self._base.compare(px, py)


def test_extraction_error_names_stage(z_small):
    mut = _SixLooksLikeFour(resolve_entry("Z:vp:2").qo)
    with pytest.raises(ExtractionError) as err:
        extract_valuation(mut, z_small)
    assert err.value.stage == "well-defined"
    assert set(err.value.witness) == {"a", "b"}


def test_ordering_axioms_reject_valuation(z_small):
    with pytest.raises(KindPreconditionError):
        check_ordering_axioms(resolve_entry("Z:vp:2").qo, z_small)


# ---------------------------------------------------------------------------
# engine self-checks
# ---------------------------------------------------------------------------

class _LyingKeyQO(QuasiOrder):
    """compare says integer <=, the sort key claims the reverse order."""

    def __init__(self):
        super().__init__("Z:lying", INTEGERS, ORDERING,
                         zero_ideal(INTEGERS), "test corruption")

    def compare(self, x, y):
        if x == y:
            return "Equivalent"
        return "Less" if x < y else "Greater"

    def key_context(self, elements):
        return 0

    def sort_key(self, x, context):
        return (-x,)


def test_engine_error_when_key_and_oracle_disagree(z_small):
    with pytest.raises(EngineError, match="disagree"):
        check_qr_axioms(_LyingKeyQO(), z_small)


def test_collapsed_axioms_skipped_when_gates_fail(z_small):
    mut = transitivity_break_mutant(resolve_entry("Z:leq").qo, z_small)
    for strategy in ("scan", "naive"):
        rep = check_qr_axioms(mut, z_small, strategy=strategy)
        assert not rep.passed
        assert rep.outcome("TRANS").status == "Fail"
        for ax in ("QR2", "QR3", "QR4"):
            out = rep.outcome(ax)
            assert out.status == "Skipped"
            assert "gates failed" in out.note


# ---------------------------------------------------------------------------
# derived lemmas
# ---------------------------------------------------------------------------

def test_derived_lemmas_valuation_and_ordering(z_small):
    val = check_derived_lemmas(resolve_entry("Z:vp:2").qo, z_small)
    assert val.passed
    assert val.outcome("ultrametric-max").status == "Pass"

    ordr = check_derived_lemmas(resolve_entry("Z:leq").qo, z_small)
    assert ordr.passed
    um = ordr.outcome("ultrametric-max")
    assert um.status == "Skipped"
    assert "valuation-kind only" in um.note
    # the skip is forced: 1+1 is not below max{1,1} under integer order
    assert resolve_entry("Z:leq").qo.compare(2, 1) == GREATER


def test_derived_lemmas_pass_for_full_catalog(z_small, qx_small, qxy_small):
    for uni in (z_small, qx_small, qxy_small):
        for entry in catalog(uni.ring):
            rep = check_derived_lemmas(entry.qo, uni)
            assert rep.passed, entry.qo.id


# ---------------------------------------------------------------------------
# mutation suite: corrupted oracles must fail
# ---------------------------------------------------------------------------

def test_mutation_suite_ordering_base(z_small):
    rep = mutation_suite(resolve_entry("Z:leq").qo, z_small)
    assert rep.suite_passed
    by_tag = {e["mutant"].rsplit("#", 1)[1]: e for e in rep.entries}
    assert set(by_tag) == {"swap", "trans-break", "neg-unit"}

    swap = by_tag["swap"]
    assert swap["failed_axioms"] == ["QR1"]
    assert swap["witnesses"]["QR1"] == {"x": "0", "y": "1"}
    assert swap["classified_as"] == VALUATION

    broken = by_tag["trans-break"]
    assert "TRANS" in broken["failed_axioms"]
    assert broken["witnesses"]["TRANS"] == {"x": "0", "y": "1", "z": "2"}
    assert "ordering_engine_error" in broken

    neg = by_tag["neg-unit"]
    assert neg["classified_as"] == VALUATION
    assert "ordering_precondition_error" in neg
    assert neg["failed_axioms"]


def test_mutation_suite_valuation_base(z_small):
    rep = mutation_suite(resolve_entry("Z:vp:2").qo, z_small)
    assert rep.suite_passed
    tags = sorted(e["mutant"].rsplit("#", 1)[1] for e in rep.entries)
    assert tags == ["swap", "trans-break"]
    for e in rep.entries:
        # valuation bases get no ordering pass, so no precondition entries
        assert "ordering_precondition_error" not in e
    d = rep.to_dict()
    assert d["suite_passed"] is True
    assert [m["mutant"] for m in d["mutants"]] == \
        [e["mutant"] for e in rep.entries]


def test_mutation_suite_polynomial_ordering(qx_small):
    rep = mutation_suite(resolve_entry("QX:Pa").qo, qx_small)
    assert rep.suite_passed
    by_tag = {e["mutant"].rsplit("#", 1)[1]: e for e in rep.entries}
    assert by_tag["neg-unit"]["classified_as"] == VALUATION
    assert "ordering_precondition_error" in by_tag["neg-unit"]


def test_recheck_rejects_non_witnesses(z_small):
    qo = resolve_entry("Z:leq").qo
    assert not recheck_witness(qo, "TRANS", {"x": "0", "y": "1", "z": "2"})
    assert not recheck_witness(qo, "QR1", {"x": "0", "y": "1"})
    assert recheck_witness(swap_mutant(qo), "QR1", {"x": "0", "y": "1"})


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def test_report_to_dict_shape(z_small):
    qo = resolve_entry("Z:vp:2").qo
    rep = check_qr_axioms(qo, z_small)
    d = rep.to_dict()
    assert d["passed"] is True
    assert [o["axiom"] for o in d["outcomes"]] == \
        ["REFL", "TOT", "TRANS", "QR1", "QR2", "QR3", "QR4"]
    assert all("witness" not in o for o in d["outcomes"])
    assert d == check_qr_axioms(qo, z_small).to_dict()


# ---------------------------------------------------------------------------
# full dichotomy on the default desk-scale universes
# ---------------------------------------------------------------------------

def test_catalog_dichotomy_on_default_universes(z_universe, qx_universe,
                                                qxy_universe):
    for uni in (z_universe, qx_universe, qxy_universe):
        n = len(uni.elements)
        for entry in catalog(uni.ring):
            qo = entry.qo
            assert check_qr_axioms(qo, uni).passed, qo.id
            assert check_derived_lemmas(qo, uni).passed, qo.id
            if classify(qo) == ORDERING:
                assert check_ordering_axioms(qo, uni).passed, qo.id
                with pytest.raises(KindPreconditionError):
                    extract_valuation(qo, uni)
            else:
                table = extract_valuation(qo, uni)
                assert table.counters["round_trip_pairs"] == n * n, qo.id
                assert qo.ring.one() in table.classes[table.neutral], qo.id
