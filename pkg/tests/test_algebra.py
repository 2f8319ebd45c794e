"""Core polynomial kernel: rings, symbols, monomials, arithmetic, JSON."""

import random
from fractions import Fraction

import pytest

from dprkit.algebra import (
    UNIT,
    CoeffRing,
    IncompatibleRings,
    Monomial,
    MissingWeight,
    Polynomial,
    UnboundVariable,
    VarSymbol,
    ZZ,
    canonical_json,
    poly_from_json,
    poly_to_json,
    symbol_from_str,
    weighted_degree,
)

X1 = VarSymbol("X", (1,))
X2 = VarSymbol("X", (2,))
Y1 = VarSymbol("Y", (1,))
U11 = VarSymbol("U", (1, 1))
V21 = VarSymbol("V", (2, 1))
A11 = VarSymbol("a", (1, 1))


def test_ring_join_by_containment():
    half = CoeffRing([2])
    sixth = CoeffRing([2, 3])
    assert half.join(ZZ) is half
    assert ZZ.join(sixth) is sixth
    assert half.join(sixth) is sixth
    with pytest.raises(IncompatibleRings):
        CoeffRing([2]).join(CoeffRing([3]))


def test_ring_denominator_admission():
    assert ZZ.admits_denominator(1)
    assert not ZZ.admits_denominator(2)
    half = CoeffRing([2])
    assert half.admits_denominator(8)
    assert not half.admits_denominator(6)
    sixth = CoeffRing([6])
    # 6 inverted means both 2 and 3 are
    assert sixth.admits_denominator(12)
    assert sixth.admits_denominator(9)
    assert not sixth.admits_denominator(5)


def test_ring_rejects_silly_units():
    with pytest.raises(ValueError):
        CoeffRing([1])
    with pytest.raises(ValueError):
        CoeffRing([0])


def test_symbol_interning_and_str():
    assert VarSymbol("X", (1,)) is X1
    assert str(U11) == "U[1][1]"
    assert str(VarSymbol("sigma1[A]")) == "sigma1[A]"


@pytest.mark.parametrize(
    "text",
    ["X[1]", "U[2][4]", "a[1][2]", "sigma1[A]", "c[A1+A2]", "beta", "p2[3]"],
)
def test_symbol_str_round_trip(text):
    assert str(symbol_from_str(text)) == text


def test_symbol_from_str_splits_only_integer_suffixes():
    sym = symbol_from_str("sigma1[A1+A2]")
    assert sym.family == "sigma1[A1+A2]"
    assert sym.indices == ()
    sym = symbol_from_str("q2[3]")
    assert sym.family == "q2"
    assert sym.indices == (3,)


def test_symbol_order_puts_relation_families_first():
    order = sorted([A11, V21, X2, U11, Y1, X1])
    assert order == [X1, X2, Y1, U11, V21, A11]


def test_monomial_normalization():
    m = Monomial({X1: 2, X2: 0})
    assert m.pairs == ((X1, 2),)
    assert m.degree == 2
    with pytest.raises(ValueError):
        Monomial([(X1, -1)])
    with pytest.raises(ValueError):
        Monomial([(X1, 1), (X1, 1)])


def test_monomial_product_merges_sorted():
    m = Monomial({X1: 1, U11: 2}) * Monomial({X1: 1, Y1: 1})
    assert m == Monomial({X1: 2, Y1: 1, U11: 2})
    assert m * UNIT == m


def test_monomial_graded_lex_order():
    # same degree: the higher power of the earlier symbol comes first
    sq = Monomial({X1: 2})
    mixed = Monomial({X1: 1, X2: 1})
    assert sq < mixed
    assert Monomial({X2: 1}) < sq


def test_weighted_degree_example():
    m = Monomial({X1: 1, X2: 1, U11: 1})
    weights = {X1: 1, X2: 1, U11: -1}
    assert weighted_degree(m, weights) == 1
    assert weighted_degree(m, lambda s: 1 if s.family == "X" else -1) == 1
    with pytest.raises(MissingWeight):
        weighted_degree(m, {X1: 1, X2: 1})


def test_polynomial_normalization():
    p = Polynomial(ZZ, {Monomial({X1: 1}): Fraction(4, 2), UNIT: 0})
    assert p.terms == {Monomial({X1: 1}): 2}
    assert isinstance(p.terms[Monomial({X1: 1})], int)
    with pytest.raises(IncompatibleRings):
        Polynomial(ZZ, {UNIT: Fraction(1, 2)})
    assert Polynomial(CoeffRing([2]), {UNIT: Fraction(1, 2)}).constant_value() == Fraction(1, 2)


def _random_poly(rng, ring=ZZ, pool=None, max_terms=4):
    pool = pool or [X1, X2, Y1, U11, A11]
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        mono = Monomial(
            {s: rng.randint(1, 2) for s in rng.sample(pool, rng.randint(0, 3))}
        )
        terms[mono] = terms.get(mono, 0) + rng.randint(-5, 5)
    return Polynomial(ring, terms)


def test_ring_axioms_on_random_triples():
    rng = random.Random(12345)
    for _ in range(100):
        p, q, r = (_random_poly(rng) for _ in range(3))
        assert (p + q) + r == p + (q + r)
        assert p + q == q + p
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p
        assert p * (q + r) == p * q + p * r
        assert p + Polynomial.zero() == p
        assert p * Polynomial.constant(1) == p
        assert p - p == Polynomial.zero()


def test_substitution_is_a_ring_morphism():
    rng = random.Random(99)
    pool = [X1, X2, Y1]
    for _ in range(60):
        p = _random_poly(rng)
        q = _random_poly(rng)
        bindings = {
            X1: _random_poly(rng, pool=pool, max_terms=2),
            U11: rng.randint(-3, 3),
            A11: _random_poly(rng, pool=pool, max_terms=2),
        }
        assert (p + q).substitute(bindings) == p.substitute(bindings) + q.substitute(bindings)
        assert (p * q).substitute(bindings) == p.substitute(bindings) * q.substitute(bindings)


def test_substitute_keeps_unbound_symbols():
    p = Polynomial(ZZ, {Monomial({X1: 1, Y1: 1}): 3})
    q = p.substitute({X1: Polynomial.constant(2)})
    assert q == Polynomial(ZZ, {Monomial({Y1: 1}): 6})


def test_evaluate_rational_matches_substitution():
    rng = random.Random(7)
    for _ in range(50):
        p = _random_poly(rng)
        point = {s: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for s in [X1, X2, Y1, U11, A11]}
        ring = CoeffRing([2, 3, 5, 7])
        on_ring = Polynomial(ring, p.terms)
        subbed = on_ring.substitute(point)
        assert subbed.is_constant()
        assert Fraction(subbed.constant_value()) == p.evaluate_rational(point)


def test_evaluate_requires_every_symbol():
    p = Polynomial.variable(X1) + Polynomial.variable(Y1)
    with pytest.raises(UnboundVariable):
        p.evaluate_rational({X1: 1})


def test_kill_monomials():
    p = (
        Polynomial.variable(X1)
        + Polynomial.variable(X2)
        + Polynomial.variable(X1) * Polynomial.variable(X2)
    )
    q = p.kill_monomials(lambda m: m.exponent(X2) > 0)
    assert q == Polynomial.variable(X1)


def test_power_matches_repeated_product():
    rng = random.Random(4)
    for _ in range(20):
        p = _random_poly(rng, max_terms=3)
        direct = Polynomial.constant(1)
        for _ in range(3):
            direct = direct * p
        assert p**3 == direct
    assert (Polynomial.variable(X1) + 1) ** 0 == Polynomial.constant(1)


def test_incompatible_ring_operations_raise():
    p = Polynomial.constant(Fraction(1, 2), CoeffRing([2]))
    q = Polynomial.constant(Fraction(1, 3), CoeffRing([3]))
    with pytest.raises(IncompatibleRings):
        p + q


def test_json_round_trip_is_byte_stable():
    rng = random.Random(2024)
    for _ in range(40):
        p = _random_poly(rng, ring=CoeffRing([2, 3]))
        blob = canonical_json(poly_to_json(p))
        again = canonical_json(poly_to_json(poly_from_json(poly_to_json(p))))
        assert blob == again
        assert poly_from_json(poly_to_json(p)) == p


def test_json_terms_are_graded_lex_sorted():
    p = (
        Polynomial.constant(1)
        + Polynomial.variable(X2)
        + Polynomial.variable(X1)
        + Polynomial.variable(X1) * Polynomial.variable(X2)
        + Polynomial.variable(X1) * Polynomial.variable(X1)
    )
    rendered = [list(t["monomial"].keys()) for t in poly_to_json(p)["terms"]]
    assert rendered == [[], ["X[1]"], ["X[2]"], ["X[1]"], ["X[1]", "X[2]"]]
    # the two degree-2 terms: X[1]^2 precedes X[1]*X[2]
    assert poly_to_json(p)["terms"][3]["monomial"] == {"X[1]": 2}


def test_str_rendering():
    p = Polynomial(ZZ, {UNIT: -1, Monomial({X1: 1}): 1, Monomial({X1: 1, U11: 2}): -3})
    assert str(p) == "-1 + X[1] - 3*X[1]*U[1][1]^2"
