"""The quasi-ordering oracle abstraction and the named catalog.

A quasi-ordering is a reflexive, transitive, total binary relation on a ring
compatible with the ring structure.  Every catalog oracle is a closed-form
rule: comparisons work for arbitrary canonical elements, not only universe
members.  Valuation-induced oracles compare by x <= y iff v(y) <= v(x);
cone-induced orderings compare by the sign of the difference.

Each oracle also exposes a sort key that realizes the same total preorder
through plain tuple comparison; the verification engine exploits this for
collapsed exhaustive scans, and the key/compare agreement is itself tested.
"""

from __future__ import annotations

from fractions import Fraction

from .rings import (INTEGERS, POLY_BI, POLY_UNI, Ideal, monomial_ideal,
                    primes_up_to, principal_int_ideal, zero_ideal)

LESS = "Less"
EQUIVALENT = "Equivalent"
GREATER = "Greater"

ORDERING = "Ordering"
VALUATION = "Valuation"

INF = "inf"  # valuation value of the support elements


def _cmp(a, b):
    return LESS if a < b else (EQUIVALENT if a == b else GREATER)


def flip(c):
    return LESS if c == GREATER else (GREATER if c == LESS else EQUIVALENT)


class SupportMismatch(Exception):
    """Computed support disagrees with the declared one."""

    def __init__(self, qo_id, element, expected_member):
        self.qo_id = qo_id
        self.element = element
        self.expected_member = expected_member
        side = "declared but not computed" if expected_member else "computed but not declared"
        super().__init__(f"{qo_id}: support mismatch at element ({side})")


class QuasiOrder:
    """Named total-preorder oracle on a ring."""

    def __init__(self, qo_id, ring, declared_kind, declared_support, provenance):
        self.id = qo_id
        self.ring = ring
        self.declared_kind = declared_kind
        self.declared_support = declared_support
        self.provenance = provenance

    def __repr__(self):
        return f"<{self.id}>"

    def compare(self, x, y):
        raise NotImplementedError

    # --- sort keys for the scan engine -----------------------------------
    def key_context(self, elements):
        """Context needed to build mutually comparable sort keys."""
        return None

    def sort_key(self, x, ctx=None):
        raise NotImplementedError

    # --- generic derived operations ---------------------------------------
    def is_trivial(self):
        return False

    def value_of(self, x):
        """Underlying valuation value, or None for cone orderings."""
        return None

    def support_members(self, universe):
        return [x for x in universe if self.compare(x, self.ring.zero()) == EQUIVALENT]


def compare(qo, x, y):
    """Public comparison entry point with ring membership checks."""
    qo.ring.check_element(x)
    qo.ring.check_element(y)
    return qo.compare(x, y)


def support_of(qo, universe):
    """Computed support on the universe, validated against the declaration.

    Returns (set of elements, declared ideal).  Raises SupportMismatch with
    the offending element when computation and declaration disagree.
    """
    members = set()
    ideal = qo.declared_support
    for x in universe:
        computed = qo.compare(x, qo.ring.zero()) == EQUIVALENT
        declared = ideal.contains(x)
        if computed != declared:
            raise SupportMismatch(qo.id, x, declared)
        if computed:
            members.add(x)
    return members, ideal


class ClassifyError(Exception):
    """-1 fell into the support, which the axioms forbid."""


def classify(qo):
    """Ordering iff -1 is strictly negative; Valuation otherwise."""
    minus_one = qo.ring.neg(qo.ring.one())
    c = qo.compare(minus_one, qo.ring.zero())
    if c == LESS:
        return ORDERING
    if c == EQUIVALENT:
        raise ClassifyError(f"{qo.id}: -1 is equivalent to 0")
    return VALUATION


# ---------------------------------------------------------------------------
# concrete oracle families
# ---------------------------------------------------------------------------

class ValuationQO(QuasiOrder):
    """Quasi-ordering induced by a valuation: x <= y iff v(y) <= v(x).

    ``value_fn`` returns INF on the support and an order-encoding tuple
    elsewhere; smaller tuple means smaller value.  ``semigroup`` documents
    the exact value semigroup (used by the registered structure rules).
    """

    def __init__(self, qo_id, ring, support, provenance, value_fn,
                 value_show, semigroup):
        super().__init__(qo_id, ring, VALUATION, support, provenance)
        self._value_fn = value_fn
        self._value_show = value_show
        self.semigroup = semigroup

    def value_of(self, x):
        return self._value_fn(x)

    def show_value(self, v):
        return "inf" if v == INF else self._value_show(v)

    def compare(self, x, y):
        vx, vy = self._value_fn(x), self._value_fn(y)
        if vx == INF and vy == INF:
            return EQUIVALENT
        if vx == INF:
            return LESS  # v(x) = inf > v(y), so x is below y
        if vy == INF:
            return GREATER
        return _cmp(vy, vx)

    def sort_key(self, x, ctx=None):
        v = self._value_fn(x)
        if v == INF:
            return (0,)
        return (1,) + tuple(-c for c in v)

    def is_trivial(self):
        return self.semigroup.get("trivial", False)


class ConeOrderingQO(QuasiOrder):
    """Ordering induced by a positive cone: x <= y iff y - x is in the cone.

    ``sign_fn`` maps a nonzero element to +1 or -1 (membership of the cone's
    strict part); the cone is pointed, so the support is (0).
    """

    def __init__(self, qo_id, ring, support, provenance, sign_fn, key_fn):
        super().__init__(qo_id, ring, ORDERING, support, provenance)
        self._sign_fn = sign_fn
        self._key_fn = key_fn

    def compare(self, x, y):
        d = self.ring.sub(y, x)
        if d == self.ring.zero():
            return EQUIVALENT
        return LESS if self._sign_fn(d) > 0 else GREATER

    def key_context(self, elements):
        # max degree present; keys are coefficient tuples of this length + 1
        deg = 0
        for x in elements:
            if x.terms:
                deg = max(deg, x.degree())
        return deg

    def sort_key(self, x, ctx=None):
        return self._key_fn(x, ctx)

    def in_cone(self, x):
        """Membership of the nonnegative cone."""
        return self.compare(self.ring.zero(), x) != GREATER


class EvalAtZeroQO(QuasiOrder):
    """Ordering-kind oracle comparing polynomial values at 0."""

    def __init__(self, qo_id, ring, support, provenance):
        super().__init__(qo_id, ring, ORDERING, support, provenance)

    def compare(self, x, y):
        return _cmp(x.eval_at_zero(), y.eval_at_zero())

    def sort_key(self, x, ctx=None):
        return (x.eval_at_zero(),)


class IntegerLeqQO(QuasiOrder):
    """The standard ordering of the integers."""

    def __init__(self, support):
        super().__init__(
            "Z:leq", INTEGERS, ORDERING, support,
            "standard ordering of the integers; support (0)")

    def compare(self, x, y):
        return _cmp(x, y)

    def sort_key(self, x, ctx=None):
        return (x,)


def trivial_qo(ring, support, qo_id):
    """Trivial quasi-ordering at a prime ideal: exactly two classes, the
    ideal and its complement; induced by the trivial valuation."""

    def value_fn(x):
        return INF if support.contains(x) else (0,)

    return ValuationQO(
        qo_id, ring, support,
        f"trivial valuation at {support.name}: value 0 outside the ideal",
        value_fn, lambda v: "0",
        {"trivial": True, "is_group": True, "nonnegative": True,
         "description": "the one-point group {0}"})


# --- integer valuations -----------------------------------------------------

def padic_qo(p):
    support = zero_ideal(INTEGERS)

    def value_fn(x):
        if x == 0:
            return INF
        v = 0
        x = abs(x)
        while x % p == 0:
            x //= p
            v += 1
        return (v,)

    return ValuationQO(
        f"Z:vp:{p}", INTEGERS, support,
        f"{p}-adic valuation: x <= y iff the exponent of {p} in y is at most "
        f"the exponent of {p} in x",
        value_fn, lambda v: str(v[0]),
        {"is_group": False, "nonnegative": True,
         "description": "the nonnegative integers under addition",
         "positive_example": p})


# --- univariate oracles -----------------------------------------------------

def _lowest_term(f):
    # terms are stored in descending graded-lex order, so the last is lowest
    return f.terms[-1]


def pa_sign(d):
    return 1 if _lowest_term(d)[1] > 0 else -1


def pa_key(f, max_deg):
    # coefficients read from degree 0 upward; lex order matches the cone
    return tuple(f.coeff((i,)) for i in range(max_deg + 1))


def pna_sign(d):
    return 1 if d.terms[0][1] > 0 else -1


def pna_key(f, max_deg):
    # coefficients read from the top degree downward
    return tuple(f.coeff((i,)) for i in range(max_deg, -1, -1))


def vdeg_qo():
    support = zero_ideal(POLY_UNI)

    def value_fn(f):
        return INF if f.is_zero() else (-f.degree(),)

    return ValuationQO(
        "QX:vdeg", POLY_UNI, support,
        "degree valuation: f maps to minus its degree",
        value_fn, lambda v: str(v[0]),
        {"is_group": False, "nonnegative": False,
         "description": "0 and the negative integers under addition",
         "no_inverse_note": "X has value -1 and no element has value 1, "
                            "since every value is at most 0"})


def qx_w_qo():
    support = zero_ideal(POLY_UNI)

    def value_fn(f):
        return INF if f.is_zero() else (_lowest_term(f)[0][0],)

    return ValuationQO(
        "QX:w", POLY_UNI, support,
        "order of vanishing at 0: f maps to its least exponent",
        value_fn, lambda v: str(v[0]),
        {"is_group": False, "nonnegative": True,
         "description": "the nonnegative integers under addition",
         "positive_example": "X"})


# --- bivariate oracles ------------------------------------------------------

def _invlex_value(exps):
    # inverse lexicographic order on exponent pairs compares the Y-exponent
    # first; encode (i, j) as (j, i) so tuple comparison realizes it
    i, j = exps
    return (j, i)


def qxy_v_qo():
    support = zero_ideal(POLY_BI)

    def value_fn(f):
        if f.is_zero():
            return INF
        return min(_invlex_value(e) for e, _ in f.terms)

    return ValuationQO(
        "QXY:v", POLY_BI, support,
        "least exponent pair under the inverse lexicographic order "
        "(Y-exponent compared first)",
        value_fn, lambda v: f"({v[1]},{v[0]})",
        {"is_group": False, "nonnegative": True,
         "description": "pairs of nonnegative integers under componentwise "
                        "addition, inverse lexicographic order",
         "positive_example": "X"})


def qxy_w_qo():
    support = monomial_ideal(POLY_BI, ["Y"])

    def value_fn(f):
        best = None
        for (i, j), _ in f.terms:
            if j == 0 and (best is None or i < best):
                best = i
        return INF if best is None else (best,)

    return ValuationQO(
        "QXY:w", POLY_BI, support,
        "least X-exponent over the Y-free monomials; elements of (Y) map "
        "to infinity",
        value_fn, lambda v: str(v[0]),
        {"is_group": False, "nonnegative": True,
         "description": "the nonnegative integers under addition",
         "positive_example": "X"})


def qxy_u_qo():
    support = zero_ideal(POLY_BI)

    def value_fn(f):
        if f.is_zero():
            return INF
        return (min(j for (_, j), _ in f.terms),)

    return ValuationQO(
        "QXY:u", POLY_BI, support,
        "least Y-exponent over all monomials",
        value_fn, lambda v: str(v[0]),
        {"is_group": False, "nonnegative": True,
         "description": "the nonnegative integers under addition",
         "positive_example": "Y"})


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

class CatalogEntry:
    """QuasiOrder plus closed-form description and declared coarsening facts.

    ``facts`` maps a coarser entry id to a citation sentence; declared facts
    never bypass the refutation search, they only upgrade a passed search to
    a Verified decision.  ``metadata`` carries the registered exact-rule data
    used by the structure predicates.
    """

    def __init__(self, qo, description, facts=None, metadata=None):
        self.qo = qo
        self.id = qo.id
        self.description = description
        self.facts = dict(facts or {})
        self.metadata = dict(metadata or {})

    def __repr__(self):
        return f"CatalogEntry({self.id})"


TRIVIAL_FACT = ("the trivial quasi-ordering at the shared support is the "
                "maximum of the fixed-support tree, hence coarser than "
                "every member")


def _triv_id(ring, token):
    return f"{ring.alias}:triv:{token}"


def catalog(ring, prime_bound=5):
    """Named catalog of quasi-orderings on the given ring."""
    entries = []
    if ring == INTEGERS:
        leq = IntegerLeqQO(zero_ideal(INTEGERS))
        entries.append(CatalogEntry(
            leq, "x <= y as integers",
            facts={_triv_id(ring, "0"): TRIVIAL_FACT},
            metadata={"special_witness_hint": "square",
                      "not_manis_rule": "support-not-maximal"}))
        for p in primes_up_to(prime_bound):
            entries.append(CatalogEntry(
                padic_qo(p),
                f"x <= y iff v_{p}(y) <= v_{p}(x), with v_{p} the exponent "
                f"of {p}",
                facts={_triv_id(ring, "0"): TRIVIAL_FACT}))
        entries.append(CatalogEntry(
            trivial_qo(ring, zero_ideal(INTEGERS), _triv_id(ring, "0")),
            "two classes: 0 and everything else"))
        for p in primes_up_to(prime_bound):
            entries.append(CatalogEntry(
                trivial_qo(ring, principal_int_ideal(p),
                           _triv_id(ring, str(p))),
                f"two classes: multiples of {p} and the rest"))
    elif ring == POLY_UNI:
        z = zero_ideal(POLY_UNI)
        ix = monomial_ideal(POLY_UNI, ["X"])
        pa = ConeOrderingQO(
            "QX:Pa", POLY_UNI, z,
            "lowest-coefficient cone (labelled archimedean in the source "
            "catalog, although X is infinitesimal under it; the printed "
            "formula is implemented verbatim and the label kept)",
            pa_sign, pa_key)
        entries.append(CatalogEntry(
            pa, "f is nonnegative iff its lowest nonzero coefficient is "
                "positive",
            facts={"QX:w": "under the lowest-coefficient cone, 0 <= f <= g "
                           "forces the vanishing order at 0 of g to be at "
                           "most that of f, which is exactly the transfer "
                           "required for the vanishing-order valuation",
                   _triv_id(ring, "0"): TRIVIAL_FACT},
            metadata={"convex_ideal_above_support": "X",
                      "convexity_note": "a cone-nonnegative element below a "
                                        "multiple of X has zero constant "
                                        "term",
                      "figure_note": "drawn directly below the trivial "
                                     "valuation in the source diagram; "
                                     "direct computation places it below "
                                     "the vanishing-order valuation as "
                                     "well, and the computed relation is "
                                     "reported unaltered"}))
        pna = ConeOrderingQO(
            "QX:Pna", POLY_UNI, z,
            "leading-coefficient cone (labelled non-archimedean in the "
            "source catalog)",
            pna_sign, pna_key)
        entries.append(CatalogEntry(
            pna, "f is nonnegative iff its leading coefficient is positive",
            facts={"QX:vdeg": "under the leading-coefficient cone, "
                              "0 <= f <= g forces deg f <= deg g, which is "
                              "the transfer required for the degree "
                              "valuation",
                   _triv_id(ring, "0"): TRIVIAL_FACT},
            metadata={"special_witness_hint": "square"}))
        entries.append(CatalogEntry(
            vdeg_qo(), "f maps to -deg f",
            facts={_triv_id(ring, "0"): TRIVIAL_FACT}))
        entries.append(CatalogEntry(
            qx_w_qo(), "f maps to its order of vanishing at 0",
            facts={_triv_id(ring, "0"): TRIVIAL_FACT}))
        entries.append(CatalogEntry(
            EvalAtZeroQO("QX:eval0", POLY_UNI, ix,
                         "derived example: evaluation ordering at 0, "
                         "witnessing proper inclusions among ordering-kind "
                         "quasi-orderings"),
            "f <= g iff f(0) <= g(0); support is (X)",
            facts={_triv_id(ring, "X"): TRIVIAL_FACT},
            metadata={"special_witness_hint": "square"}))
        entries.append(CatalogEntry(
            trivial_qo(ring, z, _triv_id(ring, "0")),
            "two classes: 0 and everything else"))
        entries.append(CatalogEntry(
            trivial_qo(ring, ix, _triv_id(ring, "X")),
            "two classes: multiples of X and the rest"))
    elif ring == POLY_BI:
        z = zero_ideal(POLY_BI)
        iy = monomial_ideal(POLY_BI, ["Y"])
        ixy = monomial_ideal(POLY_BI, ["X", "Y"])
        entries.append(CatalogEntry(
            qxy_v_qo(), "least exponent pair, inverse lexicographic",
            facts={"QXY:w": "a strict drop in the least Y-free X-exponent "
                            "forces a strict drop in the inverse-lex least "
                            "exponent pair",
                   "QXY:u": "a strict drop in the least Y-exponent forces a "
                            "strict drop in the inverse-lex least exponent "
                            "pair",
                   _triv_id(ring, "0"): TRIVIAL_FACT}))
        entries.append(CatalogEntry(
            qxy_w_qo(), "least X-exponent among Y-free monomials",
            facts={_triv_id(ring, "Y"): TRIVIAL_FACT}))
        entries.append(CatalogEntry(
            qxy_u_qo(), "least Y-exponent",
            facts={_triv_id(ring, "0"): TRIVIAL_FACT}))
        entries.append(CatalogEntry(
            trivial_qo(ring, z, _triv_id(ring, "0")),
            "two classes: 0 and everything else"))
        entries.append(CatalogEntry(
            trivial_qo(ring, iy, _triv_id(ring, "Y")),
            "two classes: multiples of Y and the rest"))
        entries.append(CatalogEntry(
            trivial_qo(ring, ixy, _triv_id(ring, "XY")),
            "two classes: the ideal (X,Y) and the rest"))
    else:
        raise KeyError(f"no catalog for ring {ring!r}")
    return entries


def catalog_by_id(ring, prime_bound=5):
    return {e.id: e for e in catalog(ring, prime_bound)}


def resolve_entry(qo_id, prime_bound=23):
    """Find a catalog entry by id across all rings.

    Prime-indexed ids extend the prime bound as needed so e.g. Z:vp:13
    resolves even though the default catalog stops at 5.
    """
    for ring in (INTEGERS, POLY_UNI, POLY_BI):
        if qo_id.startswith(ring.alias + ":"):
            mapping = catalog_by_id(ring, prime_bound)
            if qo_id in mapping:
                return mapping[qo_id]
    raise KeyError(f"unknown quasi-ordering id {qo_id!r}")
