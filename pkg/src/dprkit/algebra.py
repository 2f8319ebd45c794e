"""Exact sparse multivariate polynomials over localized integer coefficient rings.

Everything downstream (series arithmetic, relation builders, verifier
sampling) reduces to the small kernel in this module: interned variable
symbols with a deterministic total order, immutable monomials, and
polynomials whose coefficients are ints or Fractions with denominators
controlled by the coefficient ring.  All arithmetic is exact; nothing here
ever rounds.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Iterator, Mapping, Union

Coeff = Union[int, Fraction]


class IncompatibleRings(ValueError):
    """Raised when two coefficient rings cannot be joined by containment."""


class UnboundVariable(KeyError):
    """Raised when evaluation meets a symbol with no assigned value."""


class MissingWeight(KeyError):
    """Raised when a weighted degree is requested for an unweighted symbol."""


class CoeffRing:
    """Z with a chosen set of inverted integers, e.g. Z[1/2, 1/3].

    Two rings are compatible only when one's inverted set contains the
    other's; the join is then the larger ring.  A denominator is admitted
    when it divides some product of inverted integers, checked by repeated
    gcd stripping so no factorization is needed.
    """

    __slots__ = ("inverted",)
    _cache: dict[frozenset[int], "CoeffRing"] = {}

    def __new__(cls, inverted: Iterable[int] = ()) -> "CoeffRing":
        key = frozenset(int(n) for n in inverted)
        for n in key:
            if n <= 1:
                raise ValueError(f"cannot invert {n}")
        cached = cls._cache.get(key)
        if cached is None:
            cached = object.__new__(cls)
            object.__setattr__(cached, "inverted", key)
            cls._cache[key] = cached
        return cached

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("CoeffRing is immutable")

    def __repr__(self) -> str:
        if not self.inverted:
            return "CoeffRing()"
        return f"CoeffRing({sorted(self.inverted)})"

    def contains(self, other: "CoeffRing") -> bool:
        return other.inverted <= self.inverted

    def join(self, other: "CoeffRing") -> "CoeffRing":
        if self.contains(other):
            return self
        if other.contains(self):
            return other
        raise IncompatibleRings(f"{self!r} and {other!r} are not nested")

    def admits_denominator(self, den: int) -> bool:
        den = abs(den)
        if den == 1:
            return True
        if not self.inverted:
            return False
        stripped = True
        while stripped and den > 1:
            stripped = False
            for n in self.inverted:
                g = gcd(den, n)
                while g > 1:
                    den //= g
                    g = gcd(den, n)
                    stripped = True
        return den == 1

    def check_coeff(self, c: Coeff) -> None:
        if isinstance(c, Fraction) and not self.admits_denominator(c.denominator):
            raise IncompatibleRings(f"denominator {c.denominator} not invertible in {self!r}")


ZZ = CoeffRing()

# The relation alphabet needs X < Y < U < V while every other family sorts
# alphabetically after them; plain string comparison would put U before X.
_FAMILY_RANK = {"X": 0, "Y": 1, "U": 2, "V": 3}
_LATE_RANK = len(_FAMILY_RANK)

_INDEX_SUFFIX = re.compile(r"^(.*)\[(\d+)\]$")


class VarSymbol:
    """An interned variable: a family tag plus integer indices.

    Families are free-form strings; bracketed annotations that are not pure
    integers stay part of the family (``sigma1[A]`` is a family with no
    indices, ``U[1][3]`` is family ``U`` with indices (1, 3)).  Interning
    makes equality an identity check and lets monomials share sort keys.
    """

    __slots__ = ("family", "indices", "sort_key", "_hash")
    _cache: dict[tuple[str, tuple[int, ...]], "VarSymbol"] = {}

    def __new__(cls, family: str, indices: Iterable[int] = ()) -> "VarSymbol":
        idx = tuple(int(i) for i in indices)
        cached = cls._cache.get((family, idx))
        if cached is None:
            if not family:
                raise ValueError("empty symbol family")
            cached = object.__new__(cls)
            object.__setattr__(cached, "family", family)
            object.__setattr__(cached, "indices", idx)
            object.__setattr__(
                cached, "sort_key", (_FAMILY_RANK.get(family, _LATE_RANK), family, idx)
            )
            object.__setattr__(cached, "_hash", hash((family, idx)))
            cls._cache[(family, idx)] = cached
        return cached

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("VarSymbol is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return self is other

    def __lt__(self, other: "VarSymbol") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"VarSymbol({str(self)!r})"

    def __str__(self) -> str:
        return self.family + "".join(f"[{i}]" for i in self.indices)


def symbol_from_str(text: str) -> VarSymbol:
    """Inverse of str(VarSymbol): trailing [int] groups become indices."""
    indices: list[int] = []
    while True:
        m = _INDEX_SUFFIX.match(text)
        if m is None:
            break
        text = m.group(1)
        indices.append(int(m.group(2)))
    if not text:
        raise ValueError("empty symbol family")
    return VarSymbol(text, reversed(indices))


class Monomial:
    """An immutable product of symbol powers; exponents are positive ints.

    Sorted internally by symbol so equal monomials share one representation.
    The order on monomials is graded lexicographic: lower total degree
    first, and within a degree a higher power of an earlier symbol first.
    """

    __slots__ = ("pairs", "degree", "_hash")

    def __init__(self, exponents: Mapping[VarSymbol, int] | Iterable[tuple[VarSymbol, int]] = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        pairs = []
        for sym, exp in items:
            exp = int(exp)
            if exp == 0:
                continue
            if exp < 0:
                raise ValueError(f"negative exponent for {sym}")
            pairs.append((sym, exp))
        pairs.sort(key=lambda p: p[0].sort_key)
        for i in range(1, len(pairs)):
            if pairs[i - 1][0] is pairs[i][0]:
                raise ValueError(f"duplicate symbol {pairs[i][0]}")
        object.__setattr__(self, "pairs", tuple(pairs))
        object.__setattr__(self, "degree", sum(e for _, e in pairs))
        object.__setattr__(self, "_hash", hash(self.pairs))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Monomial is immutable")

    @classmethod
    def _raw(cls, pairs: tuple[tuple[VarSymbol, int], ...]) -> "Monomial":
        self = object.__new__(cls)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "degree", sum(e for _, e in pairs))
        object.__setattr__(self, "_hash", hash(pairs))
        return self

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self.pairs == other.pairs

    def sort_key(self):
        return (self.degree, tuple((s.sort_key, -e) for s, e in self.pairs))

    def __lt__(self, other: "Monomial") -> bool:
        return self.sort_key() < other.sort_key()

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not self.pairs:
            return other
        if not other.pairs:
            return self
        # merge two symbol-sorted pair lists
        a, b = self.pairs, other.pairs
        out: list[tuple[VarSymbol, int]] = []
        i = j = 0
        while i < len(a) and j < len(b):
            sa, sb = a[i][0], b[j][0]
            if sa is sb:
                out.append((sa, a[i][1] + b[j][1]))
                i += 1
                j += 1
            elif sa.sort_key < sb.sort_key:
                out.append(a[i])
                i += 1
            else:
                out.append(b[j])
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return Monomial._raw(tuple(out))

    def exponent(self, sym: VarSymbol) -> int:
        for s, e in self.pairs:
            if s is sym:
                return e
        return 0

    def symbols(self) -> Iterator[VarSymbol]:
        return (s for s, _ in self.pairs)

    def __str__(self) -> str:
        if not self.pairs:
            return "1"
        return "*".join(str(s) if e == 1 else f"{s}^{e}" for s, e in self.pairs)

    def __repr__(self) -> str:
        return f"Monomial({str(self)!r})"


UNIT = Monomial()


def weighted_degree(mono: Monomial, weights: Mapping[VarSymbol, int] | Callable[[VarSymbol], int]) -> int:
    """Total degree of `mono` with each symbol scaled by its weight."""
    total = 0
    for sym, exp in mono.pairs:
        if callable(weights):
            w = weights(sym)
        else:
            w = weights.get(sym)
        if w is None:
            raise MissingWeight(str(sym))
        total += w * exp
    return total


def _normalize_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    return int(c)


class Polynomial:
    """A finite sum of coefficient*monomial terms over a CoeffRing.

    Terms live in a dict keyed by Monomial; zero coefficients are never
    stored, and integer-valued Fractions are demoted to int, so equal
    polynomials have identical term dicts.  Binary operations join the two
    rings and fail loudly when the rings are not nested.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CoeffRing, terms: Mapping[Monomial, Coeff] | Iterable[tuple[Monomial, Coeff]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Coeff] = {}
        for mono, c in items:
            c = _normalize_coeff(c)
            if c == 0:
                continue
            ring.check_coeff(c)
            if mono in clean:
                c = _normalize_coeff(clean[mono] + c)
                if c == 0:
                    del clean[mono]
                    continue
            clean[mono] = c
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, ring: CoeffRing, terms: dict[Monomial, Coeff]) -> "Polynomial":
        self = object.__new__(cls)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", terms)
        return self

    @classmethod
    def zero(cls, ring: CoeffRing = ZZ) -> "Polynomial":
        return cls._raw(ring, {})

    @classmethod
    def constant(cls, c: Coeff, ring: CoeffRing = ZZ) -> "Polynomial":
        c = _normalize_coeff(c)
        if c == 0:
            return cls._raw(ring, {})
        ring.check_coeff(c)
        return cls._raw(ring, {UNIT: c})

    @classmethod
    def variable(cls, sym: VarSymbol, ring: CoeffRing = ZZ) -> "Polynomial":
        return cls._raw(ring, {Monomial._raw(((sym, 1),)): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and UNIT in self.terms)

    def constant_value(self) -> Coeff:
        if not self.terms:
            return 0
        if len(self.terms) == 1 and UNIT in self.terms:
            return self.terms[UNIT]
        raise ValueError("polynomial is not constant")

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(m.degree for m in self.terms)

    def coefficient(self, mono: Monomial) -> Coeff:
        return self.terms.get(mono, 0)

    def symbols(self) -> set[VarSymbol]:
        out: set[VarSymbol] = set()
        for m in self.terms:
            out.update(m.symbols())
        return out

    def sorted_terms(self) -> list[tuple[Monomial, Coeff]]:
        return sorted(self.terms.items(), key=lambda t: t[0].sort_key())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other, self.ring)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.ring)
        return None

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        ring = self.ring.join(other.ring)
        if not self.terms:
            return other if other.ring is ring else Polynomial._raw(ring, dict(other.terms))
        out = dict(self.terms)
        for mono, c in other.terms.items():
            acc = _normalize_coeff(out.get(mono, 0) + c)
            if acc == 0:
                out.pop(mono, None)
            else:
                out[mono] = acc
        return Polynomial._raw(ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = _normalize_coeff(other)
            if other == 0:
                return Polynomial._raw(self.ring, {})
            self.ring.check_coeff(other)
            if other == 1:
                return self
            return Polynomial._raw(
                self.ring, {m: _normalize_coeff(c * other) for m, c in self.terms.items()}
            )
        if not isinstance(other, Polynomial):
            return NotImplemented
        ring = self.ring.join(other.ring)
        out: dict[Monomial, Coeff] = {}
        # iterate the smaller factor outside
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        for ma, ca in a.items():
            for mb, cb in b.items():
                mono = ma * mb
                acc = _normalize_coeff(out.get(mono, 0) + ca * cb)
                if acc == 0:
                    out.pop(mono, None)
                else:
                    out[mono] = acc
        return Polynomial._raw(ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(1, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def substitute(self, bindings: Mapping[VarSymbol, "Polynomial | Coeff"]) -> "Polynomial":
        """Ring morphism: replace bound symbols, keep unbound ones as themselves."""
        ring = self.ring
        cache: dict[tuple[VarSymbol, int], Polynomial] = {}

        def image_power(sym: VarSymbol, exp: int) -> Polynomial:
            got = cache.get((sym, exp))
            if got is None:
                val = bindings[sym]
                if not isinstance(val, Polynomial):
                    val = Polynomial.constant(val, ring)
                got = val**exp
                cache[(sym, exp)] = got
            return got

        total = Polynomial.zero(ring)
        for mono, c in self.terms.items():
            kept: list[tuple[VarSymbol, int]] = []
            factor: Polynomial | None = None
            for sym, exp in mono.pairs:
                if sym in bindings:
                    piece = image_power(sym, exp)
                    factor = piece if factor is None else factor * piece
                else:
                    kept.append((sym, exp))
            term = Polynomial._raw(self.ring, {Monomial._raw(tuple(kept)): c})
            total = total + (term if factor is None else term * factor)
        return total

    def evaluate_rational(self, point: Mapping[VarSymbol, Coeff]) -> Fraction:
        """Evaluate at a full rational point; every symbol must be bound."""
        total = Fraction(0)
        for mono, c in self.terms.items():
            acc = Fraction(c)
            for sym, exp in mono.pairs:
                if sym not in point:
                    raise UnboundVariable(str(sym))
                acc *= Fraction(point[sym]) ** exp
            total += acc
        return total

    def kill_monomials(self, predicate: Callable[[Monomial], bool]) -> "Polynomial":
        """Drop every term whose monomial satisfies the predicate."""
        return Polynomial._raw(
            self.ring, {m: c for m, c in self.terms.items() if not predicate(m)}
        )

    def map_symbols(self, mapping: Callable[[VarSymbol], VarSymbol]) -> "Polynomial":
        """Rename symbols; the map must stay injective on each monomial."""
        out: dict[Monomial, Coeff] = {}
        for mono, c in self.terms.items():
            renamed = Monomial((mapping(s), e) for s, e in mono.pairs)
            acc = _normalize_coeff(out.get(renamed, 0) + c)
            if acc == 0:
                out.pop(renamed, None)
            else:
                out[renamed] = acc
        return Polynomial._raw(self.ring, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono, c in self.sorted_terms():
            if mono is UNIT or not mono.pairs:
                body = str(c)
            elif c == 1:
                body = str(mono)
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{c}*{mono}"
            if parts and not body.startswith("-"):
                parts.append(f"+ {body}")
            elif parts:
                parts.append(f"- {body[1:]}")
            else:
                parts.append(body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


# spec-facing functional aliases

def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def substitute(p: Polynomial, bindings: Mapping[VarSymbol, Polynomial | Coeff]) -> Polynomial:
    return p.substitute(bindings)


def evaluate_rational(p: Polynomial, point: Mapping[VarSymbol, Coeff]) -> Fraction:
    return p.evaluate_rational(point)


def kill_monomials(p: Polynomial, predicate: Callable[[Monomial], bool]) -> Polynomial:
    return p.kill_monomials(predicate)


# serialization

def coeff_to_json(c: Coeff) -> dict:
    f = Fraction(c)
    return {"num": str(f.numerator), "den": str(f.denominator)}


def coeff_from_json(obj: Mapping) -> Coeff:
    return _normalize_coeff(Fraction(int(obj["num"]), int(obj["den"])))


def poly_to_json(p: Polynomial) -> dict:
    terms = []
    for mono, c in p.sorted_terms():
        terms.append(
            {
                "coeff": coeff_to_json(c),
                "monomial": {str(sym): exp for sym, exp in mono.pairs},
            }
        )
    return {"ring": {"inverted": sorted(p.ring.inverted)}, "terms": terms}


def poly_from_json(obj: Mapping) -> Polynomial:
    ring = CoeffRing(obj["ring"]["inverted"])
    terms: dict[Monomial, Coeff] = {}
    for entry in obj["terms"]:
        mono = Monomial((symbol_from_str(k), e) for k, e in entry["monomial"].items())
        terms[mono] = coeff_from_json(entry["coeff"])
    return Polynomial(ring, terms)


def canonical_json(obj) -> str:
    """Deterministic rendering used for every machine-readable output."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"
