"""Exact arithmetic for the shipped rings, ideals, and universe enumeration.

Three concrete unital commutative rings: arbitrary-precision integers,
univariate polynomials over exact rationals, and bivariate polynomials over
exact rationals.  Integers are plain Python ints; polynomials are immutable
sparse maps from exponent vectors to nonzero Fraction coefficients.  There is
no floating point anywhere in this package.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from fractions import Fraction


def _grlex_key(exps):
    # graded lexicographic with X before Y: total degree, then X-exponent
    return (sum(exps),) + tuple(exps)


class Poly:
    """Immutable sparse polynomial with Fraction coefficients.

    ``terms`` is a tuple of (exponent-vector, coefficient) pairs sorted in
    descending graded-lex order (X before Y); zero coefficients are never
    stored, so equal polynomials have identical term tuples.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms):
        self.nvars = nvars
        cleaned = {}
        for exps, coeff in terms:
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} has wrong arity")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = cleaned.get(exps, Fraction(0)) + coeff
            if coeff:
                cleaned[exps] = coeff
            elif exps in cleaned:
                del cleaned[exps]
        self.terms = tuple(sorted(cleaned.items(),
                                  key=lambda t: _grlex_key(t[0]),
                                  reverse=True))
        # hash over int leaves; hashing Fraction objects is far slower
        self._hash = hash((nvars,) + tuple(
            (e, c.numerator, c.denominator) for e, c in self.terms))

    @classmethod
    def const(cls, nvars, value):
        value = Fraction(value)
        return cls(nvars, [((0,) * nvars, value)] if value else [])

    @classmethod
    def monomial(cls, nvars, exps, coeff=1):
        return cls(nvars, [(tuple(exps), Fraction(coeff))])

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return self._hash

    def __neg__(self):
        return Poly(self.nvars, [(e, -c) for e, c in self.terms])

    def __add__(self, other):
        if not isinstance(other, Poly) or other.nvars != self.nvars:
            return NotImplemented
        acc = dict(self.terms)
        for e, c in other.terms:
            s = acc.get(e, Fraction(0)) + c
            if s:
                acc[e] = s
            elif e in acc:
                del acc[e]
        return Poly(self.nvars, acc.items())

    def __sub__(self, other):
        return self.__add__(-other)

    def __mul__(self, other):
        if not isinstance(other, Poly) or other.nvars != self.nvars:
            return NotImplemented
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                s = acc.get(e, Fraction(0)) + c1 * c2
                if s:
                    acc[e] = s
                elif e in acc:
                    del acc[e]
        return Poly(self.nvars, acc.items())

    def coeff(self, exps):
        exps = tuple(exps)
        for e, c in self.terms:
            if e == exps:
                return c
        return Fraction(0)

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e, _ in self.terms)

    def eval_at_zero(self):
        return self.coeff((0,) * self.nvars)

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"


def poly_key(p):
    """Canonical hashable form with int leaves: ((exps, num, den), ...).

    Bulk table builders work on these instead of Poly objects; Fraction
    construction and hashing dominate otherwise.
    """
    return tuple((e, c.numerator, c.denominator) for e, c in p.terms)


def poly_from_key(nvars, key):
    return Poly(nvars, [(e, Fraction(n, d)) for e, n, d in key])


def _normalize_acc(acc):
    out = []
    for e, (n, d) in acc.items():
        if n == 0:
            continue
        if d < 0:
            n, d = -n, -d
        g = math.gcd(n, d)
        out.append((e, n // g, d // g))
    out.sort(key=lambda t: _grlex_key(t[0]), reverse=True)
    return tuple(out)


def key_mul(ka, kb):
    """Product of two canonical forms, again canonical."""
    acc = {}
    for ea, na, da in ka:
        for eb, nb, db in kb:
            e = tuple(x + y for x, y in zip(ea, eb))
            n, d = na * nb, da * db
            cur = acc.get(e)
            if cur is None:
                acc[e] = (n, d)
            else:
                cn, cd = cur
                acc[e] = (n * cd + cn * d, d * cd)
    return _normalize_acc(acc)


def key_add(ka, kb):
    """Sum of two canonical forms, again canonical."""
    acc = {e: (n, d) for e, n, d in ka}
    for e, n, d in kb:
        cur = acc.get(e)
        if cur is None:
            acc[e] = (n, d)
        else:
            cn, cd = cur
            acc[e] = (n * cd + cn * d, d * cd)
    return _normalize_acc(acc)


_VARS = ("X", "Y")

_TERM_RE = re.compile(
    r"^(?:(?P<coeff>\d+(?:/\d+)?)(?:\*(?P<mons1>[XY](?:\^\d+)?(?:\*[XY](?:\^\d+)?)*))?"
    r"|(?P<mons2>[XY](?:\^\d+)?(?:\*[XY](?:\^\d+)?)*))$")


def _show_poly(p):
    if not p.terms:
        return "0"
    parts = []
    for exps, coeff in p.terms:
        mons = []
        for var, e in zip(_VARS, exps):
            if e == 1:
                mons.append(var)
            elif e > 1:
                mons.append(f"{var}^{e}")
        mag = abs(coeff)
        if mons and mag == 1:
            body = "*".join(mons)
        elif mons:
            body = f"{mag}*" + "*".join(mons)
        else:
            body = str(mag)
        sign = "-" if coeff < 0 else "+"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _parse_poly(nvars, text):
    s = text.strip()
    if not s:
        raise ValueError("empty element text")
    # split into signed terms at top level; no parentheses in the syntax
    s = s.replace(" ", "")
    chunks = re.findall(r"[+-]?[^+-]+", s)
    if "".join(chunks) != s:
        raise ValueError(f"cannot parse {text!r}")
    terms = []
    for chunk in chunks:
        sign = 1
        if chunk.startswith("+"):
            chunk = chunk[1:]
        elif chunk.startswith("-"):
            sign = -1
            chunk = chunk[1:]
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError(f"bad term {chunk!r} in {text!r}")
        coeff = Fraction(m.group("coeff")) if m.group("coeff") else Fraction(1)
        mons = m.group("mons1") or m.group("mons2") or ""
        exps = [0] * nvars
        if mons:
            for factor in mons.split("*"):
                if "^" in factor:
                    var, e = factor.split("^")
                    e = int(e)
                else:
                    var, e = factor, 1
                idx = _VARS.index(var)
                if idx >= nvars:
                    raise ValueError(f"variable {var} not in this ring")
                exps[idx] += e
        terms.append((tuple(exps), sign * coeff))
    return Poly(nvars, terms)


class RingHandle:
    """One of the shipped rings: Integers (Z), PolyUni (QX), PolyBi (QXY)."""

    _BY_ALIAS = {}

    def __init__(self, ring_id, alias, name, nvars):
        self.id = ring_id
        self.alias = alias
        self.name = name
        self.nvars = nvars  # 0 for the integers

    def __repr__(self):
        return f"RingHandle({self.alias})"

    def __eq__(self, other):
        return isinstance(other, RingHandle) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    # --- element constructors -------------------------------------------
    def zero(self):
        return 0 if self.nvars == 0 else Poly(self.nvars, [])

    def one(self):
        return 1 if self.nvars == 0 else Poly.const(self.nvars, 1)

    def const(self, value):
        if self.nvars == 0:
            value = Fraction(value)
            if value.denominator != 1:
                raise ValueError("non-integer constant in the integer ring")
            return int(value)
        return Poly.const(self.nvars, value)

    def var(self, name):
        idx = _VARS.index(name)
        if idx >= self.nvars:
            raise ValueError(f"no variable {name} in {self.alias}")
        exps = [0] * self.nvars
        exps[idx] = 1
        return Poly.monomial(self.nvars, exps)

    # --- membership and arithmetic --------------------------------------
    def contains(self, x):
        if self.nvars == 0:
            return isinstance(x, int)
        return isinstance(x, Poly) and x.nvars == self.nvars

    def check_element(self, x):
        if not self.contains(x):
            raise ValueError(f"{x!r} is not an element of {self.name}")

    def add(self, x, y):
        self.check_element(x)
        self.check_element(y)
        return x + y

    def mul(self, x, y):
        self.check_element(x)
        self.check_element(y)
        return x * y

    def neg(self, x):
        self.check_element(x)
        return -x

    def sub(self, x, y):
        self.check_element(x)
        self.check_element(y)
        return x - y

    # --- textual syntax ---------------------------------------------------
    def show(self, x):
        self.check_element(x)
        return str(x) if self.nvars == 0 else _show_poly(x)

    def parse(self, text):
        if self.nvars == 0:
            s = text.strip()
            if not re.fullmatch(r"-?\d+", s):
                raise ValueError(f"bad integer literal {text!r}")
            return int(s)
        return _parse_poly(self.nvars, text)


INTEGERS = RingHandle("Integers", "Z", "ring of integers", 0)
POLY_UNI = RingHandle("PolyUni", "QX", "univariate polynomials over the rationals", 1)
POLY_BI = RingHandle("PolyBi", "QXY", "bivariate polynomials over the rationals", 2)

RINGS = {r.alias: r for r in (INTEGERS, POLY_UNI, POLY_BI)}
RingHandle._BY_ALIAS = RINGS


def ring_by_id(token):
    """Resolve 'Z'/'QX'/'QXY' or the long ids 'Integers'/'PolyUni'/'PolyBi'."""
    for r in RINGS.values():
        if token in (r.alias, r.id):
            return r
    raise KeyError(f"unknown ring id {token!r}")


def ring_arith(ring, x, y, op):
    """Exact arithmetic entry point; op is one of add, mul, neg."""
    if op == "add":
        return ring.add(x, y)
    if op == "mul":
        return ring.mul(x, y)
    if op == "neg":
        return ring.neg(x)
    raise ValueError(f"unknown op {op!r}")


class Ideal:
    """Ideal with decidable membership.

    Integers: membership is divisibility by the gcd of the generators.
    Polynomial rings: the shipped ideals are (0) and the monomial ideals
    (X), (Y), (X,Y); a polynomial belongs to a monomial ideal iff each of
    its monomials is divisible by some generator.
    """

    def __init__(self, ring, name, generators, is_prime, is_maximal):
        self.ring = ring
        self.name = name
        self.generators = tuple(generators)
        self.is_prime = is_prime
        self.is_maximal = is_maximal

    def __repr__(self):
        return f"Ideal({self.ring.alias}, {self.name})"

    def __eq__(self, other):
        return (isinstance(other, Ideal) and self.ring == other.ring
                and self.name == other.name)

    def __hash__(self):
        return hash((self.ring, self.name))

    def contains(self, x):
        self.ring.check_element(x)
        if self.ring.nvars == 0:
            g = 0
            for gen in self.generators:
                g = math.gcd(g, gen)
            if g == 0:
                return x == 0
            return x % g == 0
        if not self.generators or all(g.is_zero() for g in self.generators):
            return x.is_zero()
        gen_exps = [g.terms[0][0] for g in self.generators if not g.is_zero()]
        for exps, _ in x.terms:
            if not any(all(e >= ge for e, ge in zip(exps, gexps))
                       for gexps in gen_exps):
                return False
        return True


def ideal_contains(ideal, x):
    if not ideal.ring.contains(x):
        raise ValueError(f"{x!r} does not belong to {ideal.ring.name}")
    return ideal.contains(x)


def zero_ideal(ring):
    return Ideal(ring, "(0)", [ring.zero()], is_prime=True, is_maximal=False)


def principal_int_ideal(p):
    # (p) for prime p; maximal since Z/(p) is a field
    return Ideal(INTEGERS, f"({p})", [p], is_prime=True, is_maximal=True)


def monomial_ideal(ring, var_names):
    gens = [ring.var(v) for v in var_names]
    name = "(" + ",".join(var_names) + ")"
    # (X) is maximal in QX (quotient is the rational field); in QXY only
    # (X,Y) is maximal, the principal ideals sit strictly inside it
    maximal = len(var_names) == ring.nvars
    return Ideal(ring, name, gens, is_prime=True, is_maximal=maximal)


def shipped_ideals(ring, prime_bound=5):
    """The ideal families with decidable membership, keyed by short token."""
    out = {"0": zero_ideal(ring)}
    if ring.nvars == 0:
        for p in primes_up_to(prime_bound):
            out[str(p)] = principal_int_ideal(p)
    elif ring.nvars == 1:
        out["X"] = monomial_ideal(ring, ["X"])
    else:
        out["X"] = monomial_ideal(ring, ["X"])
        out["Y"] = monomial_ideal(ring, ["Y"])
        out["XY"] = monomial_ideal(ring, ["X", "Y"])
    return out


def primes_up_to(bound):
    ps = []
    for n in range(2, bound + 1):
        if all(n % p for p in ps):
            ps.append(n)
    return ps


class UniverseBounds:
    """Enumeration bounds: magnitude B (integers), max exponent D, max term
    count T, coefficient set C, extra sample count S, and seed."""

    def __init__(self, B=8, D=2, T=2, C=(-1, 1), S=0, seed=0):
        self.B = B
        self.D = D
        self.T = T
        self.C = tuple(sorted(Fraction(c) for c in C))
        self.S = S
        self.seed = seed

    def describe(self, ring):
        if ring.nvars == 0:
            d = {"B": self.B}
        else:
            d = {"D": self.D, "T": self.T,
                 "C": [str(c) for c in self.C]}
        if self.S:
            d["S"] = self.S
            d["seed"] = self.seed
        return d


class Universe:
    """Finite, deterministically enumerated list of ring elements."""

    def __init__(self, ring, bounds, elements):
        self.ring = ring
        self.bounds = bounds
        self.elements = tuple(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def describe(self):
        d = {"ring": self.ring.alias, "size": len(self.elements)}
        d.update(self.bounds.describe(self.ring))
        return d


def enumerate_universe(ring, bounds):
    """Deterministic universe enumeration.

    Integers: 0, 1, -1, 2, -2, ..., B, -B.  Polynomials: zero, then all
    canonical polynomials with at most T nonzero terms, exponents at most D
    componentwise and coefficients drawn from C, enumerated by term count,
    then support, then coefficient assignment; afterwards a negation-closure
    pass appends any missing negatives.  With S > 0, S seeded pseudo-random
    extra elements within looser bounds are appended (negation-closed too).
    """
    if ring.nvars == 0:
        if bounds.B < 2:
            raise ValueError("integer magnitude bound must be at least 2")
        elems = [0]
        for n in range(1, bounds.B + 1):
            elems.extend((n, -n))
        seen = set(elems)
    else:
        if bounds.D < 1 or bounds.T < 1:
            raise ValueError("exponent and term bounds must be at least 1")
        if not bounds.C:
            raise ValueError("empty coefficient set")
        if Fraction(1) not in bounds.C:
            raise ValueError("coefficient set must contain 1")
        exps = [e for e in itertools.product(range(bounds.D + 1),
                                             repeat=ring.nvars)]
        exps.sort(key=_grlex_key)
        elems = [ring.zero()]
        seen = {elems[0]}
        for size in range(1, bounds.T + 1):
            for support in itertools.combinations(exps, size):
                for coeffs in itertools.product(bounds.C, repeat=size):
                    p = Poly(ring.nvars, zip(support, coeffs))
                    if p not in seen:
                        seen.add(p)
                        elems.append(p)
        # negation closure (C need not be symmetric)
        for x in list(elems):
            nx = -x
            if nx not in seen:
                seen.add(nx)
                elems.append(nx)

    if bounds.S > 0:
        rng = random.Random(bounds.seed)
        added = 0
        attempts = 0
        while added < bounds.S and attempts < 1000 * (bounds.S + 1):
            attempts += 1
            x = _random_element(ring, bounds, rng)
            if x not in seen:
                seen.add(x)
                elems.append(x)
                added += 1
                nx = -x
                if nx not in seen:
                    seen.add(nx)
                    elems.append(nx)
    if not elems:
        raise ValueError("bounds produce an empty universe")
    return Universe(ring, bounds, elems)


def _random_element(ring, bounds, rng):
    # looser than the exhaustive part: one extra exponent step and term,
    # numerators up to 9 with denominators up to 4
    if ring.nvars == 0:
        return rng.randint(-bounds.B * bounds.B, bounds.B * bounds.B)
    nterms = rng.randint(1, bounds.T + 1)
    terms = []
    for _ in range(nterms):
        e = tuple(rng.randint(0, bounds.D + 1) for _ in range(ring.nvars))
        num = rng.choice([n for n in range(-9, 10) if n])
        den = rng.randint(1, 4)
        terms.append((e, Fraction(num, den)))
    return Poly(ring.nvars, terms)


def default_bounds(ring):
    """Universe bounds used by the verification battery."""
    if ring.nvars == 0:
        return UniverseBounds(B=8)
    if ring.nvars == 1:
        return UniverseBounds(D=3, T=2, C=(-2, -1, 1, 2))
    return UniverseBounds(D=2, T=2, C=(-1, 1))


def default_universe(ring):
    return enumerate_universe(ring, default_bounds(ring))
