"""
Replays every checkable statement about the quadratic and cubic families this
toolkit was built to study, each against an independently computed expectation.

Claims are plain functions returning ``(passed, expected, computed)``; the
registry below names them by what they state. Slow claims (continuation runs
and the degree-24 cubic resultant) are skipped in quick mode.
"""
from builtins import abs, all, any, bool, classmethod, float, int, len, max, min, reversed, sorted, str, sum, tuple, type, zip
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple
import logging
import math
import time

from app.exceptions import BifurcationError
from app.models.map_family import FamilyName
from app.models.polynomial import Interval, ParamPoly, T, UniPoly, X
from app.schemas.bubble_schemas import ReportKind
from app.schemas.orbit_schemas import EventKind
from app.schemas.verification_schemas import ClaimResult, VerificationReport
from app.services.continuation_service import ContinuationService
from app.services.detection_service import BIRTH_PARAMETERS, DetectionService
from app.services.diagram_service import DiagramService
from app.services.event_service import EventService, EventTypes
from app.services.family_service import FamilyService
from app.services.period_service import PeriodService
from app.services.poly_service import PolyService
from app.utils.parsing import sqrt_root

logger = logging.getLogger(__name__)

Outcome = Tuple[bool, str, str]

ENDPOINT_TOL = 1e-9
FOLD_TOL = 1e-6
CUBIC_POINT = 0.5773502692
# alpha at which the attractor of 1 - alpha x**2 doubles from 1 to 2, 2 to 4 and 4 to 8 points
PERIOD_DOUBLINGS = (0.75, 1.25, 1.3680989)


def _expected_count(alpha: Fraction, threshold: Fraction, pair: int) -> int:
    if alpha < threshold:
        return 0
    return pair // 2 if alpha == threshold else pair


def _join(values) -> str:
    return ",".join(str(v) for v in values)


def _closed_form_endpoints(a: float, alpha_star: Fraction) -> Tuple[float, float]:
    half_width = math.sqrt(a * a - 4 * float(alpha_star)) / 2
    return a / 2 - half_width, a / 2 + half_width


def period3_coefficients() -> Outcome:
    alpha = T
    expected = ParamPoly.from_expr(
        alpha**6 * X**6 - alpha**5 * X**5 + (-3 * alpha**5 + alpha**4) * X**4
        + (2 * alpha**4 - alpha**3) * X**3 + (3 * alpha**4 - 3 * alpha**3 + alpha**2) * X**2
        + (-alpha**3 + 2 * alpha**2 - alpha) * X - alpha**3 + 2 * alpha**2 - alpha + 1
    )
    phi = PeriodService.dynatomic(FamilyService.normal_form(), 3).phi
    return phi == expected, str(expected.as_expr()), str(phi.as_expr())


def period3_counts() -> Outcome:
    normal = FamilyService.normal_form()
    alphas = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(174, 100), Fraction(7, 4),
              Fraction(18, 10), Fraction(2), Fraction(3)]
    expected = [_expected_count(a, BIRTH_PARAMETERS[3], 6) for a in alphas]
    computed = [PeriodService.count_period_points(normal, 3, a).count for a in alphas]
    return expected == computed, _join(expected), _join(computed)


def tangent_locus() -> Outcome:
    normal = FamilyService.normal_form()
    found = []
    for n in (3, 2):
        locus = PeriodService.tangent_parameters(normal, n)
        hits = [p for p in locus.params if PolyService.compare(p, BIRTH_PARAMETERS[n]) == 0]
        found.append(len(locus.params) == 1 and len(hits) == 1)
        if hits:
            refined = PolyService.refine(hits[0], Fraction(1, 10**12))
            found.append(refined.isolator.contains(1.75 if n == 3 else 0.75))
    expected = f"singletons at {BIRTH_PARAMETERS[3]} (n=3) and {BIRTH_PARAMETERS[2]} (n=2)"
    return all(found) and len(found) == 4, expected, _join(found)


def perfect_square() -> Outcome:
    certificate = PeriodService.square_certificate(FamilyService.normal_form(), 3, BIRTH_PARAMETERS[3])
    expected = (Fraction(343, 64), Fraction(-49, 32), Fraction(-63, 16), Fraction(1, 8))
    computed = tuple(reversed(certificate.root.coefficients)) if certificate.root is not None else ()
    return computed == expected, _join(expected), _join(computed) or "not a square"


def descartes_vs_sturm() -> Outcome:
    h = PeriodService.dynatomic(FamilyService.normal_form(), 3).phi.specialize(2)
    computed = (PolyService.descartes_changes(h), PolyService.sturm_count(h))
    return computed == (3, 6), "3,6", _join(computed)


def scaled_family_transfer() -> Outcome:
    family = FamilyService.builtin(FamilyName.S_FIXED_A, [2])
    params = [Fraction(1, 2), Fraction(7, 8), Fraction(1)]
    expected = [_expected_count(2 * c, BIRTH_PARAMETERS[3], 6) for c in params]
    computed = [PeriodService.count_period_points(family, 3, c).count for c in params]
    return expected == computed, _join(expected), _join(computed)


def _bubble_claim(a: str, n: int, scan_range: Interval, grid: int) -> Outcome:
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [a])
    closed = DetectionService.bubble_closed_form(a, n)
    scanned = DetectionService.detect(family, n, scan_range, grid=grid, search_points=False)
    lo, hi = _closed_form_endpoints(float(Fraction(a)), BIRTH_PARAMETERS[n])
    ok = (
        closed.kind == ReportKind.BUBBLE and scanned.kind == ReportKind.BUBBLE
        and max(abs(closed.interval_lo - lo), abs(closed.interval_hi - hi)) <= ENDPOINT_TOL
        and max(abs(scanned.interval_lo - lo), abs(scanned.interval_hi - hi)) <= ENDPOINT_TOL
    )
    computed = (
        f"closed-form [{closed.interval_lo:.10f}, {closed.interval_hi:.10f}], "
        f"scan [{scanned.interval_lo if scanned.interval_lo is not None else float('nan'):.10f}, "
        f"{scanned.interval_hi if scanned.interval_hi is not None else float('nan'):.10f}]"
    )
    return ok, f"bubble [{lo:.10f}, {hi:.10f}]", computed


def period3_bubble() -> Outcome:
    return _bubble_claim("2.658", 3, Interval(Fraction(1, 10), Fraction(5, 2)), 97)


def period2_bubble() -> Outcome:
    return _bubble_claim("2.35", 2, Interval(Fraction(1, 5), Fraction(11, 5)), 41)


def sqrt7_point() -> Outcome:
    a = sqrt_root(Fraction(7))
    report = DetectionService.detect(FamilyService.builtin(FamilyName.T_FIXED_A, [a]), 3)
    ok = report.kind == ReportKind.POINT
    computed = f"kind={report.kind.value}"
    if ok:
        event = report.events[0]
        vertex = sqrt_root(Fraction(7, 4))
        flanks = report.certificates.get("flank_counts", {})
        ok = (
            PolyService.compare(event.exact_lo, vertex) == 0
            and event.exact_lo.isolator.width <= Fraction(1, 10**9)
            and len(flanks) == 4 and not any(flanks.values())
        )
        computed += f", c={event.center:.10f}, flank counts {flanks}"
    return ok, f"kind=point, c={math.sqrt(7) / 2:.10f}, flank counts all 0", computed


def logistic_effective_parameter() -> Outcome:
    mu = PolyService.isolate_real_roots(UniPoly([-7, -2, 1]))[-1]
    alpha = FamilyService.effective_parameter(FamilyService.builtin(FamilyName.LOGISTIC), mu)
    return alpha == BIRTH_PARAMETERS[3], str(BIRTH_PARAMETERS[3]), str(alpha)


def _closest_fold(branch, target: float) -> float:
    candidates = [e.param for e in branch.events_of(EventKind.FOLD)]
    return min(candidates, key=lambda p: abs(p - target)) if candidates else math.nan


def logistic_fold() -> Outcome:
    family = FamilyService.builtin(FamilyName.LOGISTIC)
    target = 1 + 2 * math.sqrt(2)
    seeds = ContinuationService.distinct_cycles(ContinuationService.seed_orbits(family, 3, Fraction(39, 10)))
    found = []
    for seed in seeds:
        branch = ContinuationService.continue_branch(family, 3, seed, (3.8, 3.9))
        found.append(_closest_fold(branch, target))
    ok = bool(found) and all(abs(f - target) <= FOLD_TOL for f in found)
    return ok, f"fold at {target:.9f} on every branch", _join(f"{f:.9f}" for f in found)


def normal_form_continuation() -> Outcome:
    normal = FamilyService.normal_form()
    seeds = ContinuationService.seed_orbits(normal, 3, 2)
    upward, folds = [], []
    for seed in seeds:
        up = ContinuationService.continue_branch(normal, 3, seed, (2.0, 3.0))
        upward.append(not up.terminated and up.points[-1].param == 3.0
                      and max(p.residual for p in up.points) <= 1e-12)
        down = ContinuationService.continue_branch(normal, 3, seed, (1.7, 2.0))
        folds.append(_closest_fold(down, 1.75))
    near = ContinuationService.seed_orbits(normal, 3, Fraction(7, 4))
    multipliers = []
    for root in near:
        point = ContinuationService.newton_orbit(normal, 3, 1.75 + 1e-9, root.cycle[0] + 1e-5)
        multipliers.append(point.multiplier)
    ok = (
        len(seeds) == 6 and all(upward)
        and all(abs(f - 1.75) <= FOLD_TOL for f in folds)
        and bool(multipliers) and all(abs(m - 1) <= 1e-3 for m in multipliers)
    )
    computed = (
        f"{len(seeds)} seeds, {sum(upward)} reach 3, folds {_join(f'{f:.9f}' for f in folds)}, "
        f"multipliers {_join(f'{m:.6f}' for m in multipliers)}"
    )
    return ok, "6 seeds reach 3; folds at 1.75; multipliers 1 +- 1e-3", computed


def cubic_point_pair() -> Outcome:
    family = FamilyService.builtin(FamilyName.CUBIC_EXERCISE)
    report = DetectionService.detect(family, 3, Interval(-2, 2), grid=41)
    points = sorted(e.center for e in report.events_of("point"))
    ok = (
        len(points) == 2 and abs(points[0] + points[1]) <= ENDPOINT_TOL
        and abs(points[1] - CUBIC_POINT) <= 1e-6
    )
    return ok, f"point pair at +-{CUBIC_POINT}", _join(f"{p:.10f}" for p in points)


def _doubling_bands(alpha: float) -> int:
    """Bands of the attractor of 1 - alpha x**2 along the period-doubling cascade of its fixed point."""
    return 2 ** sum(1 for threshold in PERIOD_DOUBLINGS if alpha > threshold)


def _band_fraction(a: str, n: int, expected_bands: Callable[[float], int], n_params: int) -> Tuple[float, int]:
    """Share of parameters in the middle 90% of the closed-form bubble whose diagram column shows the expected bands."""
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [a])
    closed = DetectionService.bubble_closed_form(a, n)
    span = closed.interval_hi - closed.interval_lo
    inner_lo, inner_hi = closed.interval_lo + 0.05 * span, closed.interval_hi - 0.05 * span
    t_range = (closed.interval_lo - 0.05 * span, closed.interval_hi + 0.05 * span)
    dataset = DiagramService.orbit_diagram(family, t_range, n_params=n_params, transient=10_000, keep=120)
    a_value = float(Fraction(a))
    inside = [(p, s) for p, s in zip(dataset.params, dataset.samples) if inner_lo < p < inner_hi]
    matched = [p for p, s in inside if DiagramService.count_bands(s, 1e-3) == expected_bands((a_value - p) * p)]
    return len(matched) / len(inside) if inside else 0.0, len(inside)


def diagram_bands() -> Outcome:
    three, _ = _band_fraction("2.658", 3, lambda alpha: 3, 400)
    doubling, _ = _band_fraction("2.35", 2, _doubling_bands, 400)
    ok = three >= 0.9 and doubling >= 0.9
    return (
        ok,
        "3 bands across the period-3 bubble (a=2.658); 2, 4, 8 bands following alpha = (a-c)c across the period-2 bubble (a=2.35), on >= 90% of its middle",
        f"{three:.3f}, {doubling:.3f}",
    )


@dataclass(frozen=True)
class Claim:
    name: str
    statement: str
    check: Callable[[], Outcome]
    slow: bool = False


CLAIMS: List[Claim] = [
    Claim("period3-polynomial-of-normal-form", "Period-3 divisor polynomial of 1 - alpha x**2 has the expected coefficients", period3_coefficients),
    Claim("period3-born-at-seven-quarters", "Period-3 points of 1 - alpha x**2: none below the fold value, 3 at it, 6 above", period3_counts),
    Claim("only-folds-at-seven-and-three-quarters", "The only positive tangent parameters are 7/4 (period 3) and 3/4 (period 2)", tangent_locus),
    Claim("perfect-square-at-fold", "At alpha = 7/4 the period-3 polynomial is the square of an explicit cubic", perfect_square),
    Claim("six-period3-points-at-alpha-two", "At alpha = 2: 3 sign changes bound the positive roots; 6 real roots in all", descartes_vs_sturm),
    Claim("scaled-family-period3-never-dies", "a - c x**2 with a = 2 has 0, 3, 6 period-3 points as a c crosses 7/4", scaled_family_transfer),
    Claim("period3-bubble-above-sqrt7", "a - c - c x**2 with a = 2.658 has a period-3 bubble at a/2 -+ sqrt(a**2 - 7)/2", period3_bubble),
    Claim("point-bifurcation-at-sqrt7", "With a = sqrt7 the period-3 orbit exists only at c = sqrt7/2", sqrt7_point),
    Claim("period2-bubble-above-sqrt3", "a - c - c x**2 with a = 2.35 has a period-2 bubble at a/2 -+ sqrt(a**2 - 3)/2", period2_bubble),
    Claim("logistic-conjugate-to-normal-form", "The logistic map at mu = 1 + 2 sqrt2 reduces to alpha = 7/4", logistic_effective_parameter),
    Claim("logistic-period3-born-at-1-plus-2sqrt2", "Continuing logistic period-3 orbits down from mu = 3.9 ends at the fold 1 + 2 sqrt2", logistic_fold, slow=True),
    Claim("period3-orbits-persist-above-fold", "All six period-3 points of 1 - 2x**2 continue to alpha = 3 and fold back at 7/4", normal_form_continuation, slow=True),
    Claim("cubic-period3-point-pair", "x**3 - 2x + c has a symmetric pair of period-3 point bifurcations", cubic_point_pair, slow=True),
    Claim("bubbles-visible-in-orbit-diagrams", "Orbit diagrams show 3 bands across the period-3 bubble and the doubling cascade across the period-2 bubble", diagram_bands),
]


class VerificationService:

    @classmethod
    def check(cls, claim: Claim) -> ClaimResult:
        started = time.perf_counter()
        try:
            passed, expected, computed = claim.check()
        except BifurcationError as e:
            logger.error(f"Claim {claim.name} raised {type(e).__name__}: {e}")
            passed, expected, computed = False, "no error", f"{type(e).__name__}: {e}"
        result = ClaimResult(
            name=claim.name,
            statement=claim.statement,
            passed=bool(passed),
            expected=expected,
            computed=computed,
            seconds=time.perf_counter() - started,
        )
        EventService.publish(EventTypes.CLAIM_CHECKED, {"claim": claim.name, "passed": result.passed})
        return result

    @classmethod
    def run(cls, quick: bool = False) -> VerificationReport:
        claims = [c for c in CLAIMS if not (quick and c.slow)]
        report = VerificationReport(claims=[cls.check(c) for c in claims], quick=quick)
        logger.info(f"Verification finished: {sum(c.passed for c in report.claims)}/{len(report.claims)} claims pass")
        return report
