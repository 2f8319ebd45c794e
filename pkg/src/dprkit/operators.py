"""Randomized exact verification of the operator identities behind the
relation polynomials.

The relation polynomials assert identities between operators attached to
class sums: a two-class correction law (the H expression) and its n-class
iteration.  Verification substitutes random rational values for the free
generators, solves the side conditions exactly (every solve is affine
because the polynomials are multilinear), and compares both sides as
Fractions.  Nothing is approximate: a pass means bit-equal rationals, and a
disagreement between the two admissible solve orders raises rather than
passes silently.

Sampling is deterministic per (seed, trial, retry), so reports are
reproducible byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .algebra import Coeff, Polynomial, VarSymbol, ZZ
from .dpr import DprPolynomial, build_ex, build_fx, build_ey, build_fy, build_gx, build_gy

__all__ = [
    "DegenerateSample",
    "ResampleLimitExceeded",
    "InconsistentSolve",
    "MissingImage",
    "RelationSystem",
    "VerificationReport",
    "h_expression",
    "apply_G",
    "verify_step_identity",
    "verify_full_identity",
]


class DegenerateSample(ArithmeticError):
    """A solve denominator vanished at the sampled point."""


class ResampleLimitExceeded(RuntimeError):
    """Too many degenerate draws in a single trial."""


class InconsistentSolve(AssertionError):
    """The two admissible solve orders disagreed; the builders are broken."""


class MissingImage(KeyError):
    """apply_G met a generator with no assigned image."""


def h_expression() -> Polynomial:
    """The two-class correction law
    cL + cM - cL cM sigma1 + cL cM cLM (sigma2 - sigma3) - cLM.
    """
    cl = Polynomial.variable(VarSymbol("cL"))
    cm = Polynomial.variable(VarSymbol("cM"))
    clm = Polynomial.variable(VarSymbol("cLM"))
    s1 = Polynomial.variable(VarSymbol("sigma1"))
    s2 = Polynomial.variable(VarSymbol("sigma2"))
    s3 = Polynomial.variable(VarSymbol("sigma3"))
    return cl + cm - cl * cm * s1 + cl * cm * clm * (s2 - s3) - clm


def apply_G(
    g: Union[DprPolynomial, Polynomial],
    images: Mapping[VarSymbol, Union[Polynomial, Coeff]],
) -> Polynomial:
    """Push a relation polynomial through a symbol-to-expression assignment.

    Every generator of `g` must have an image; the map is applied as a ring
    morphism.
    """
    if isinstance(g, DprPolynomial):
        g = g.to_polynomial()
    missing = [s for s in g.symbols() if s not in images]
    if missing:
        raise MissingImage(", ".join(str(s) for s in sorted(missing)))
    return g.substitute(images)


@dataclass(frozen=True)
class RelationSystem:
    """Deterministic sampling harness shared by the verifiers."""

    seed: int
    trials: int = 20
    sample_range: int = 1000
    resample_limit: int = 50

    def rng(self, trial: int, retry: int) -> random.Random:
        # string seeding hashes with sha512 and so ignores PYTHONHASHSEED
        return random.Random(f"{self.seed}:{trial}:{retry}")

    def draw(self, rng: random.Random, symbols: list[VarSymbol]) -> dict[VarSymbol, int]:
        r = self.sample_range
        return {s: rng.randint(-r, r) for s in symbols}


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    n: int
    m: int | None
    trials: int
    resamples: int
    passed: bool
    seed: int
    degree_bound: int | None
    sample_range: int

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "resamples": self.resamples,
            "pass": self.passed,
            "seed": self.seed,
            "degree_bound": self.degree_bound,
            "sample_range": self.sample_range,
        }


def _x_side_symbols(n: int) -> list[VarSymbol]:
    syms = [VarSymbol("X", (i,)) for i in range(1, n + 1)]
    syms += [VarSymbol("U", (1, k)) for k in range(1, n)]
    for p in (2, 3):
        syms += [VarSymbol("U", (p, k)) for k in range(2, n + 1)]
    return syms


def _y_side_symbols(m: int, with_last_class: bool) -> list[VarSymbol]:
    top = m + 1 if with_last_class else m
    syms = [VarSymbol("Y", (j,)) for j in range(1, top)]
    syms += [VarSymbol("V", (1, l)) for l in range(1, m)]
    for p in (2, 3):
        syms += [VarSymbol("V", (p, l)) for l in range(2, m + 1)]
    return syms


def verify_step_identity(
    n: int,
    trials: int = 20,
    seed: int = 0,
    sample_range: int = 1000,
    resample_limit: int = 50,
) -> VerificationReport:
    """One induction step: given the class value cC solving the (n-1)-stage
    relation, the blown-up value cB from the two-class law must solve the
    n-stage relation.  Checked exactly at random integer points.
    """
    if n < 2:
        raise ValueError("the step identity needs n >= 2")
    system = RelationSystem(seed, trials, sample_range, resample_limit)
    symbols = _x_side_symbols(n)
    e_prev, f_prev = build_ex(n - 1), build_fx(n - 1)
    e_n, f_n = build_ex(n), build_fx(n)
    sum_prev = sum(
        (Polynomial.variable(VarSymbol("X", (i,))) for i in range(1, n)),
        Polynomial.zero(),
    )
    sum_n = sum_prev + Polynomial.variable(VarSymbol("X", (n,)))

    resamples = 0
    passed = True
    for trial in range(trials):
        sample = None
        for retry in range(resample_limit):
            point = system.draw(system.rng(trial, retry), symbols)
            try:
                c_c = _solve_chain_value(point, sum_prev, e_prev, f_prev)
                c_b = _blow_up(point, c_c, n)
            except DegenerateSample:
                resamples += 1
                continue
            sample = (point, c_b)
            break
        if sample is None:
            raise ResampleLimitExceeded(f"trial {trial} of step n={n}")
        point, c_b = sample
        rhs = (
            sum_n.evaluate_rational(point)
            + e_n.evaluate_rational(point)
            + c_b * f_n.evaluate_rational(point)
        )
        if c_b != rhs:
            passed = False
    return VerificationReport(
        "step", n, None, trials, resamples, passed, seed, 2 * n - 1, sample_range
    )


def _solve_chain_value(
    point: Mapping[VarSymbol, Coeff],
    class_sum: Polynomial,
    excess: DprPolynomial,
    correction: DprPolynomial,
) -> Fraction:
    """Value cC with  sum + excess + cC * correction = cC  at the point."""
    denom = 1 - correction.evaluate_rational(point)
    if denom == 0:
        raise DegenerateSample("chain denominator vanished")
    head = Fraction(class_sum.evaluate_rational(point)) + excess.evaluate_rational(point)
    return head / denom


def _blow_up(point: Mapping[VarSymbol, Coeff], c_c: Fraction, n: int) -> Fraction:
    """Two-class law solved for the blown-up value after joining class n."""
    x_n = Fraction(point[VarSymbol("X", (n,))])
    s1 = Fraction(point[VarSymbol("U", (1, n - 1))])
    s23 = Fraction(point[VarSymbol("U", (2, n))]) - Fraction(point[VarSymbol("U", (3, n))])
    denom = 1 - c_c * x_n * s23
    if denom == 0:
        raise DegenerateSample("blow-up denominator vanished")
    return (c_c + x_n - c_c * x_n * s1) / denom


def verify_full_identity(
    n: int,
    m: int,
    trials: int = 20,
    seed: int = 0,
    sample_range: int = 1000,
    resample_limit: int = 50,
) -> VerificationReport:
    """Both relation polynomials must agree once the two one-sided chains are
    solved consistently.

    Per trial: draw every generator except the last second-family class;
    solve the first-family chain for the common class value cC; solve the
    second-family chain for the last class value (it enters affinely); then
    re-solve the second-family chain for cC — a mismatch there is an
    implementation bug and raises InconsistentSolve.  Finally both full
    relation polynomials are evaluated and compared exactly.
    """
    if n < 1 or m < 1:
        raise ValueError("both class counts must be >= 1")
    system = RelationSystem(seed, trials, sample_range, resample_limit)
    last_y = VarSymbol("Y", (m,))
    symbols = _x_side_symbols(n) + _y_side_symbols(m, with_last_class=False)

    e_x, f_x = build_ex(n), build_fx(n)
    e_y, f_y = build_ey(m), build_fy(m)
    g_x = build_gx(n, m)
    g_y = build_gy(m, n)
    sum_x = sum(
        (Polynomial.variable(VarSymbol("X", (i,))) for i in range(1, n + 1)),
        Polynomial.zero(),
    )
    sum_y_prev = sum(
        (Polynomial.variable(VarSymbol("Y", (j,))) for j in range(1, m)),
        Polynomial.zero(),
    )

    resamples = 0
    passed = True
    for trial in range(trials):
        sample = None
        for retry in range(resample_limit):
            point = dict(system.draw(system.rng(trial, retry), symbols))
            try:
                c_c = _solve_chain_value(point, sum_x, e_x, f_x)
                point[last_y] = _solve_last_class(point, c_c, m, sum_y_prev, e_y, f_y)
                y_corr = f_y.evaluate_rational(point)
                if y_corr == 1:
                    raise DegenerateSample("second-family chain denominator vanished")
            except DegenerateSample:
                resamples += 1
                continue
            sample = (point, c_c, y_corr)
            break
        if sample is None:
            raise ResampleLimitExceeded(f"trial {trial} of full ({n},{m})")
        point, c_c, y_corr = sample
        # consistency: the second-family chain must now also produce cC
        y_head = (
            sum_y_prev.evaluate_rational(point)
            + Fraction(point[last_y])
            + e_y.evaluate_rational(point)
        )
        c_c_again = y_head / (1 - y_corr)
        if c_c_again != c_c:
            raise InconsistentSolve(
                f"first-family chain gave {c_c}, second-family chain gave {c_c_again}"
            )
        if g_x.evaluate_rational(point) != g_y.evaluate_rational(point):
            passed = False
    return VerificationReport(
        "full", n, m, trials, resamples, passed, seed, 2 * (n + m) - 2, sample_range
    )


def _solve_last_class(
    point: Mapping[VarSymbol, Coeff],
    c_c: Fraction,
    m: int,
    sum_y_prev: Polynomial,
    e_y: DprPolynomial,
    f_y: DprPolynomial,
) -> Fraction:
    """Value of the last second-family class making its chain hit cC.

    The chain relation  sum + excess + cC * correction = cC  is affine in the
    last class because everything is multilinear.
    """
    if m == 1:
        return c_c
    last = VarSymbol("Y", (m,))
    at0 = dict(point)
    at0[last] = 0
    at1 = dict(point)
    at1[last] = 1
    e0 = e_y.evaluate_rational(at0)
    e_lin = e_y.evaluate_rational(at1) - e0
    f0 = f_y.evaluate_rational(at0)
    f_lin = f_y.evaluate_rational(at1) - f0
    denom = 1 + e_lin + c_c * f_lin
    if denom == 0:
        raise DegenerateSample("last-class coefficient vanished")
    return (c_c - c_c * f0 - sum_y_prev.evaluate_rational(point) - e0) / denom
