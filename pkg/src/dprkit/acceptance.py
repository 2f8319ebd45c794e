"""The package's acceptance suite: seven numbered criteria, one result each.

Every criterion is exact (integer or rational arithmetic, no tolerances) and
deterministic, so the rendered report is byte-stable across runs.  The
functions return structured results; rendering to JSON or aligned text lives
here too so the command-line selftest and the test suite share one source.

Criterion 6 is expected to come out red: with every divisor bad the two
sides of the relation identity always agree, but their common value is 1
only when min(n, m) = 1 and drops to 0 for min(n, m) >= 2.  The suite
asserts the stated constant-1 expectation and reports the disagreement
rather than weakening the check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Polynomial, VarSymbol, canonical_json
from .dpr import (
    build_ex,
    build_ey,
    build_fx,
    build_fy,
    build_gx,
    build_gy,
    check_index_bounds,
    check_multilinear,
    from_polynomial,
    mirror_check,
    padding_check,
    weight_check,
)
from .fgl import (
    BETA,
    TruncatedSeries,
    additive_mode,
    associativity_relations,
    denominator_profile,
    division_series,
    eval_dim_truncated,
    f_minus,
    inverse_series,
    law_series,
    n_fold_sum,
    series_apply,
    universal_mode,
)
from .fixedpoint import (
    DEFAULT_GUARD_GROUPS,
    all_bad_evaluation,
    claim1_case_check,
    exhaustive_guard,
)
from .operators import verify_full_identity, verify_step_identity

__all__ = [
    "CriterionResult",
    "run_criterion",
    "run_all",
    "report_json",
    "report_text",
    "selftest_output",
    "CRITERIA",
]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: tuple[str, ...]


def _var(family: str, *indices: int) -> Polynomial:
    return Polynomial.variable(VarSymbol(family, indices))


def run_criterion_1() -> CriterionResult:
    """Base-case relation polynomials match their explicit forms."""
    details = []
    ok = True

    x1, x2, y1 = _var("X", 1), _var("X", 2), _var("Y", 1)
    u11, u22, u32 = _var("U", 1, 1), _var("U", 2, 2), _var("U", 3, 2)

    checks = [
        ("first-level corrections vanish",
         len(build_ex(1)) == 0 and len(build_fx(1)) == 0
         and len(build_ey(1)) == 0 and len(build_fy(1)) == 0),
        ("two-class excess", build_ex(2) == from_polynomial(-(x1 * x2 * u11))),
        ("two-class tower correction",
         build_fx(2) == from_polynomial(x1 * x2 * u22 - x1 * x2 * u32)),
        ("two-and-one combined form",
         build_gx(2, 1) == from_polynomial(
             x1 + x2 - x1 * x2 * u11
             + y1 * x1 * x2 * u22 - y1 * x1 * x2 * u32)),
        ("one-and-two mirrored form", build_gy(1, 2) == from_polynomial(y1)),
    ]
    for label, good in checks:
        ok &= good
        details.append(f"{'ok' if good else 'FAIL'}: {label}")
    return CriterionResult(1, "base-case relation polynomials", ok, tuple(details))


def run_criterion_2() -> CriterionResult:
    """Structural invariants across the full build grid."""
    ok = True
    pairs = 0
    for n in range(1, 9):
        for m in range(1, 9):
            gx = build_gx(n, m)
            gy = build_gy(m, n)
            good = (
                check_multilinear(gx)
                and check_multilinear(gy)
                and check_index_bounds(gx, n, m)
                and check_index_bounds(gy, n, m)
                and weight_check(gx, 1)
                and weight_check(gy, 1)
                and mirror_check(n, m)
            )
            ok &= good
            pairs += 1
    paddings = 0
    for n in range(1, 7):
        for m in range(1, 7):
            for big_n in range(n, 7):
                for big_m in range(m, 7):
                    ok &= padding_check(n, m, big_n, big_m)
                    paddings += 1
    details = (
        f"multilinearity, bounds, weight, mirror on {pairs} build pairs",
        f"padding invariance on {paddings} embeddings",
    )
    return CriterionResult(2, "structural invariants of the relation builders", ok, details)


def run_criterion_3() -> CriterionResult:
    """Formal group law arithmetic at order 10, exact equality throughout."""
    order = 10
    mode = universal_mode()
    details = []
    ok = True

    law = law_series(mode, order)
    unit = all(
        (poly == (1 if sum(exp) == 1 else 0))
        for exp, poly in law.coefficients()
        if 0 in exp
    )
    comm = all(
        law.coefficient((j, i)) == poly
        for (i, j), poly in law.coefficients()
    )
    ok &= unit and comm
    details.append(f"{'ok' if unit else 'FAIL'}: unit law")
    details.append(f"{'ok' if comm else 'FAIL'}: commutativity")

    u = TruncatedSeries.variable("u", ("u",), order)
    gamma = inverse_series(mode, order)
    cancels = series_apply(law, [u, gamma]).is_zero()
    minus_diag = series_apply(f_minus(mode, order), [u, u]).is_zero()
    ok &= cancels and minus_diag
    details.append(f"{'ok' if cancels else 'FAIL'}: inverse cancels")
    details.append(f"{'ok' if minus_diag else 'FAIL'}: difference law vanishes on the diagonal")

    for n in (2, 3, 5):
        nf = n_fold_sum(mode, n, order)
        div = division_series(n, mode, order)
        round_trip = (
            series_apply(div, [nf]) == TruncatedSeries.variable("u", ("u",), order, div.ring)
            and series_apply(nf, [div]) == TruncatedSeries.variable("u", ("u",), order, div.ring)
        )
        first = div.coefficient((1,)) == Fraction(1, n)
        ok &= round_trip and first
        details.append(f"{'ok' if round_trip else 'FAIL'}: division by {n} round-trips")
        details.append(f"{'ok' if first else 'FAIL'}: first division coefficient is 1/{n}")

    leading = all(
        n_fold_sum(mode, n, order).coefficient((1,)) == n for n in range(1, 8)
    )
    ok &= leading
    details.append(f"{'ok' if leading else 'FAIL'}: n-fold sums lead with n")

    for n in (2, 3):
        profile = denominator_profile(division_series(n, mode, order))
        bound = all(k <= i * (i + 1) // 2 for i, k in profile if i <= 8)
        ok &= bound
        details.append(
            f"{'ok' if bound else 'FAIL'}: 1/{n} denominators stay within the triangular bound"
        )
    return CriterionResult(3, "formal group law arithmetic", ok, tuple(details))


def run_criterion_4() -> CriterionResult:
    """Associativity residues appear late and die under both special laws."""
    rels = associativity_relations(universal_mode(), 6)
    low = [exp for exp in rels if sum(exp) <= 2]
    ok = not low
    a11 = VarSymbol("a", (1, 1))
    beta = Polynomial.variable(BETA)
    additive_dead = True
    multiplicative_dead = True
    for rel in rels.values():
        syms = rel.symbols()
        additive_dead &= rel.substitute({s: 0 for s in syms}).is_zero()
        multiplicative_dead &= rel.substitute(
            {s: (beta if s == a11 else 0) for s in syms}
        ).is_zero()
    ok &= additive_dead and multiplicative_dead
    details = (
        f"{len(rels)} residues at order 6, lowest degree "
        f"{min((sum(e) for e in rels), default=0)}",
        f"{'ok' if additive_dead else 'FAIL'}: additive specialization vanishes",
        f"{'ok' if multiplicative_dead else 'FAIL'}: multiplicative specialization vanishes",
    )
    return CriterionResult(4, "associativity residues", ok, details)


def run_criterion_5() -> CriterionResult:
    """Sampled reduction identities with exact rationals, seed 42."""
    ok = True
    resamples = 0
    for n in range(2, 9):
        report = verify_step_identity(n, trials=20, seed=42)
        ok &= report.passed
        resamples += report.resamples
    full_pairs = 0
    for n in range(1, 6):
        for m in range(1, 6):
            report = verify_full_identity(n, m, trials=20, seed=42)
            ok &= report.passed
            resamples += report.resamples
            full_pairs += 1
    details = (
        "single-step chains for 2 <= n <= 8, 20 trials each",
        f"full identities on {full_pairs} class-count pairs, 20 trials each",
        f"{resamples} resamples, no inconsistent solves",
    )
    return CriterionResult(5, "sampled reduction identities", ok, details)


def run_criterion_6() -> CriterionResult:
    """Fixed-point evaluation table: base cases, all-bad values, the guard."""
    details = []
    ok = True

    cases_ok = all(claim1_case_check(case)["equal"] for case in range(1, 6))
    ok &= cases_ok
    details.append(f"{'ok' if cases_ok else 'FAIL'}: five base goodness patterns agree")

    mismatched = []
    off_one = []
    for n in range(1, 9):
        for m in range(1, 9):
            report = all_bad_evaluation(n, m)
            if not report["equal"]:
                mismatched.append((n, m))
            if report["lhs"] != 1:
                off_one.append((n, m, report["lhs"]))
    sides_ok = not mismatched
    ones_ok = not off_one
    ok &= sides_ok and ones_ok
    details.append(
        f"{'ok' if sides_ok else 'FAIL'}: all-bad evaluation, sides agree on all 64 pairs"
    )
    if ones_ok:
        details.append("ok: all-bad common value is 1 on all 64 pairs")
    else:
        details.append(
            f"FAIL: all-bad common value is 1 only when min(n, m) = 1; "
            f"it is 0 on the {len(off_one)} pairs with min(n, m) >= 2 "
            f"(both sides agree on 0, so the identity itself still holds)"
        )

    guard_ok = all(exhaustive_guard(group) for group in DEFAULT_GUARD_GROUPS)
    ok &= guard_ok
    details.append(
        f"{'ok' if guard_ok else 'FAIL'}: never exactly one bad divisor, "
        f"exhaustive over {len(DEFAULT_GUARD_GROUPS)} groups"
    )
    return CriterionResult(6, "fixed-point evaluation table", ok, tuple(details))


def run_criterion_7() -> CriterionResult:
    """Dimension-truncated evaluation collapses to first Chern class facts."""
    ok = True
    details = []
    c = VarSymbol("c")
    mode = universal_mode()

    linear = all(
        eval_dim_truncated(n_fold_sum(mode, p, 8), c, 1) == Polynomial.variable(c) * p
        for p in range(1, 8)
    )
    ok &= linear
    details.append(f"{'ok' if linear else 'FAIL'}: p-fold sums restrict to p*c on a curve")

    killed = True
    for d in range(0, 5):
        power = TruncatedSeries.variable("u", ("u",), 8)
        for r in range(2, 7):
            power = power * TruncatedSeries.variable("u", ("u",), 8)
            if r > d:
                killed &= eval_dim_truncated(power, c, d).is_zero()
    ok &= killed
    details.append(f"{'ok' if killed else 'FAIL'}: high powers die past the dimension")

    c1, c2 = VarSymbol("c", (1,)), VarSymbol("c", (2,))
    law = law_series(additive_mode(), 6)
    additive = all(
        eval_dim_truncated(law, [c1, c2], d)
        == Polynomial.variable(c1) + Polynomial.variable(c2)
        for d in (1, 4)
    )
    ok &= additive
    details.append(f"{'ok' if additive else 'FAIL'}: additive law sums the classes")
    return CriterionResult(7, "dimension-truncated evaluation", ok, tuple(details))


CRITERIA = {
    1: run_criterion_1,
    2: run_criterion_2,
    3: run_criterion_3,
    4: run_criterion_4,
    5: run_criterion_5,
    6: run_criterion_6,
    7: run_criterion_7,
}


def run_criterion(number: int) -> CriterionResult:
    if number not in CRITERIA:
        raise ValueError(f"no criterion {number}")
    return CRITERIA[number]()


def run_all() -> list[CriterionResult]:
    return [CRITERIA[k]() for k in sorted(CRITERIA)]


def report_json(results: list[CriterionResult]) -> dict:
    return {
        "criteria": [
            {
                "number": r.number,
                "name": r.name,
                "pass": r.passed,
                "details": list(r.details),
            }
            for r in results
        ],
        "pass": all(r.passed for r in results),
    }


def report_text(results: list[CriterionResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"criterion {r.number}  {'PASS' if r.passed else 'FAIL'}  {r.name}")
        for d in r.details:
            lines.append(f"  {d}")
    overall = all(r.passed for r in results)
    lines.append(f"overall      {'PASS' if overall else 'FAIL'}")
    return "\n".join(lines) + "\n"


def selftest_output(fmt: str = "json") -> tuple[str, bool]:
    """Render the whole suite; the string is byte-stable across runs."""
    results = run_all()
    overall = all(r.passed for r in results)
    if fmt == "text":
        return report_text(results), overall
    return canonical_json(report_json(results)), overall
