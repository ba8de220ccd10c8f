from builtins import abs, any, classmethod, dict, float, int, isinstance, len, max, min, range, sorted, str, zip
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Union
import logging

import numpy as np
import sympy as sp

from app.dependencies import get_settings
from app.exceptions import CountsEqualAtEndpoints, ExactnessRequired
from app.models.map_family import A, FamilyName, MapFamily, ParamValue
from app.models.polynomial import AlgebraicRoot, Interval, ParamPoly, RationalLike, T, UniPoly, X, as_rational, to_sympy
from app.schemas.bubble_schemas import (
    BubbleReport, CountGrid, CountSample, DetectedEvent, DetectionMethod, ReportKind, Transition,
)
from app.schemas.period_schemas import PeriodCount
from app.services.event_service import EventService, EventTypes
from app.services.family_service import FamilyService
from app.services.period_service import PeriodService
from app.services.poly_service import PolyService

settings = get_settings()
logger = logging.getLogger(__name__)

# Normal-form parameter at which the period-n orbit is born (fold for 3, flip for 2).
BIRTH_PARAMETERS: Dict[int, Fraction] = {2: Fraction(3, 4), 3: Fraction(7, 4)}

ENDPOINT_WIDTH = Fraction(1, 2 ** 40)


def _sqrt_enclosure(interval: Interval, bits: int = 64) -> Interval:
    """Rational interval containing sqrt of every point of a nonnegative interval."""
    scale = 4 ** bits
    lo = max(interval.lo, Fraction(0))
    lo_root = isqrt((lo * scale).numerator // (lo * scale).denominator)
    hi_scaled = interval.hi * scale
    hi_root = isqrt(-(-hi_scaled.numerator // hi_scaled.denominator)) + 1
    return Interval(Fraction(lo_root, 2 ** bits), Fraction(hi_root, 2 ** bits))


def _tol(value: Optional[RationalLike], default: float) -> Fraction:
    return as_rational(default if value is None else value)


class DetectionService:
    """
    Bubble and point-bifurcation detection: closed forms for the T family through
    its normal-form reduction, and a scan/refine pipeline on exact period counts
    for any family.
    """

    @classmethod
    def _t_family(cls, a: ParamValue, b: Fraction) -> MapFamily:
        return FamilyService.builtin(FamilyName.T_FIXED_A, [a, b])

    @classmethod
    def _in_a(cls, family: MapFamily, a: ParamValue, expr: sp.Expr) -> ParamValue:
        """Evaluate a polynomial in the fixed parameter a exactly."""
        poly = UniPoly.from_expr(sp.expand(expr), A)
        if isinstance(a, Fraction):
            return poly(a)
        image = PolyService.image_of_root(a, poly)
        exact = image.rational_value
        return exact if exact is not None else image

    @classmethod
    def _sign_in_a(cls, a: ParamValue, poly: UniPoly) -> int:
        if isinstance(a, Fraction):
            return poly.sign_at(a)
        return PolyService.sign_at(a, poly)

    @classmethod
    def _flank_counts(cls, family: MapFamily, n: int, a: ParamValue, b: Fraction) -> Dict[str, int]:
        """Counts at the vertex c = a/(2b) shifted by each flank offset, through alpha(c) = (a - b c) c."""
        counts = {}
        normal = FamilyService.normal_form()
        for offset in settings.flank_offsets:
            delta = to_sympy(offset)
            for sign, label in ((1, "+"), (-1, "-")):
                c_expr = A / (2 * to_sympy(b)) + sign * delta
                alpha = cls._in_a(family, a, (A - to_sympy(b) * c_expr) * c_expr)
                counts[f"{label}{offset:g}"] = PeriodService.count_period_points(normal, n, alpha).count
        return counts

    @classmethod
    def _algebraic_endpoints(cls, a: AlgebraicRoot, b: Fraction, alpha_star: Fraction) -> List[AlgebraicRoot]:
        """Real roots of b c**2 - a c + alpha_star for algebraic a, picked out of a resultant by interval arithmetic."""
        minimal = ParamPoly.from_expr(a.defining.as_expr(X))
        relation = ParamPoly.from_expr(to_sympy(b) * T**2 - X * T + to_sympy(alpha_star))
        candidates = PolyService.isolate_real_roots(PolyService.resultant_x(minimal, relation))
        endpoints = []
        for sign in (-1, 1):
            current = a
            while True:
                disc = current.isolator * current.isolator - 4 * b * alpha_star
                if disc.lo > 0:
                    enclosure = (current.isolator + sign * _sqrt_enclosure(disc)) * (1 / (2 * b))
                    hits = [c for c in candidates if c.isolator.intersects(enclosure)]
                    if len(hits) == 1:
                        endpoints.append(hits[0])
                        break
                current = PolyService.refine(current, current.isolator.width / 4)
                candidates = [PolyService.refine(c, c.isolator.width / 2) for c in candidates]
        return endpoints

    @classmethod
    def bubble_closed_form(
        cls, a: Union[ParamValue, RationalLike], n: int, b: RationalLike = 1, point_tol: Optional[RationalLike] = None,
    ) -> BubbleReport:
        """Bubble of T_{a,b,c} in c from the reduction alpha(c) = (a - b c) c."""
        if n not in BIRTH_PARAMETERS:
            raise ValueError(f"closed form exists for periods {sorted(BIRTH_PARAMETERS)}, got {n}")
        if isinstance(a, AlgebraicRoot):
            exact = PolyService.rational_value(a)
            a = exact if exact is not None else a
        else:
            a = as_rational(a)
        b = as_rational(b)
        if PolyService.compare(a, 0) <= 0:
            raise ValueError(f"a must be positive, got {a}")
        family = cls._t_family(a, b)
        alpha_star = BIRTH_PARAMETERS[n]
        width_tol = _tol(point_tol, settings.point_tol)
        discriminant = UniPoly([-4 * b * alpha_star, 0, 1])
        sign = cls._sign_in_a(a, discriminant)
        certificates = {"alpha_star": str(alpha_star), "discriminant_sign": sign}
        base = dict(family=family.descriptor, period=n, method=DetectionMethod.CLOSED_FORM)

        if sign < 0:
            logger.info(f"No period-{n} bubble for {family.descriptor}: a**2 < {4 * b * alpha_star}")
            return BubbleReport(kind=ReportKind.NONE, certificates=certificates, **base)

        if sign == 0:
            vertex_poly = UniPoly([0, 1 / (2 * b)])
            if isinstance(a, Fraction):
                vertex = AlgebraicRoot.from_rational(vertex_poly(a))
            else:
                vertex = PolyService.image_of_root(a, vertex_poly)
            vertex = PolyService.refine(vertex, min(width_tol, ENDPOINT_WIDTH))
            flanks = cls._flank_counts(family, n, a, b)
            at_point = PeriodService.count_period_points(FamilyService.normal_form(), n, alpha_star)
            certificates.update(flank_counts=flanks, count_at_point=at_point.count, alpha_at_point=str(alpha_star))
            lo, hi = vertex.isolator.as_floats()
            event = DetectedEvent(
                kind="point", lo=lo, hi=hi, count_inside=at_point.count,
                certificates={"flank_counts": flanks}, exact_lo=vertex, exact_hi=vertex,
            )
            EventService.publish(EventTypes.POINT_DETECTED, {"family": family.descriptor, "n": n, "c": str(vertex)})
            return BubbleReport(kind=ReportKind.POINT, interval_lo=lo, interval_hi=hi, events=[event], certificates=certificates, **base)

        if isinstance(a, Fraction):
            endpoints = PolyService.isolate_real_roots(UniPoly([alpha_star, -a, b]), ENDPOINT_WIDTH)
        else:
            endpoints = [PolyService.refine(e, ENDPOINT_WIDTH) for e in cls._algebraic_endpoints(a, b, alpha_star)]
        c1, c2 = endpoints
        vertex_alpha = cls._in_a(family, a, A**2 / (4 * to_sympy(b)))
        inside = PeriodService.count_period_points(FamilyService.normal_form(), n, vertex_alpha)
        certificates.update(count_inside=inside.count, endpoint_sum=str(a / b) if isinstance(a, Fraction) else f"({a})/{b}")
        event = DetectedEvent(
            kind="bubble", lo=float(c1), hi=float(c2), count_inside=inside.count, exact_lo=c1, exact_hi=c2,
        )
        EventService.publish(EventTypes.BUBBLE_DETECTED, {"family": family.descriptor, "n": n, "lo": float(c1), "hi": float(c2)})
        return BubbleReport(
            kind=ReportKind.BUBBLE, interval_lo=float(c1), interval_hi=float(c2), events=[event],
            certificates=certificates, **base,
        )

    @classmethod
    def _cell_counts(cls, family: MapFamily, n: int, points: List[Fraction]) -> Optional[List[PeriodCount]]:
        """
        Counts on a sorted grid, computed once per cell between consecutive critical
        parameters; grid points on or next to a critical isolator are counted one by
        one. None when the family has no critical locus to split the range with.
        """
        try:
            critical = PeriodService.critical_parameters(family, n)
        except (ExactnessRequired, ValueError) as e:
            logger.debug(f"Scanning {family.descriptor} point by point: {e}")
            return None
        width = (points[-1] - points[0]) / (4 * len(points))
        isolators = [PolyService.refine(c, width).isolator for c in critical]
        lows = np.array([float(iso.lo) for iso in isolators])
        highs = np.array([float(iso.hi) for iso in isolators])
        values = np.array([float(t) for t in points])
        guard = 1e-12 * np.maximum(1.0, np.abs(values))
        cells = np.searchsorted(highs, values - guard, side="left")
        touching = np.searchsorted(lows, values + guard, side="right") != cells

        by_cell: Dict[int, PeriodCount] = {}
        results = []
        for t, cell, exact in zip(points, cells.tolist(), touching.tolist()):
            if exact:
                results.append(PeriodService.count_period_points(family, n, t))
                continue
            if cell not in by_cell:
                by_cell[cell] = PeriodService.count_period_points(family, n, t)
            results.append(by_cell[cell])
        logger.debug(f"Scanned {len(points)} parameters of {family.descriptor} with {len(by_cell)} cell count(s) and {int(touching.sum())} exact count(s)")
        return results

    @classmethod
    def scan_counts(
        cls, family: MapFamily, n: int, t_range: Interval, grid: int, batched: Optional[bool] = None,
    ) -> CountGrid:
        """
        Exact period-n counts on an evenly spaced rational grid, in grid order.
        Grids of at least ``scan_batch_min`` points (or ``batched=True``) are counted
        per critical-parameter cell.
        """
        if t_range.is_point:
            points = [t_range.lo]
        else:
            if grid < 2:
                raise ValueError(f"grid must be >= 2, got {grid}")
            spacing = t_range.width / (grid - 1)
            points = [t_range.lo + i * spacing for i in range(grid)]
        batched = len(points) >= settings.scan_batch_min if batched is None else batched
        results = cls._cell_counts(family, n, points) if batched and len(points) > 1 else None
        if results is None:
            results = [PeriodService.count_period_points(family, n, t) for t in points]
        samples = [
            CountSample(param=str(t), value=float(t), count=r.count, lower_period_flag=r.lower_period_flag)
            for t, r in zip(points, results)
        ]
        return CountGrid(family=family.descriptor, period=n, samples=samples)

    @classmethod
    def _count(cls, family: MapFamily, n: int, t: Fraction) -> int:
        return PeriodService.count_period_points(family, n, t).count

    @classmethod
    def refine_transition(cls, family: MapFamily, n: int, bracket: Interval, width_tol: RationalLike) -> Interval:
        """Bisect a bracket whose end counts differ down to ``width_tol``, exactly."""
        width_tol = as_rational(width_tol)
        lo, hi = bracket.lo, bracket.hi
        count_lo, count_hi = cls._count(family, n, lo), cls._count(family, n, hi)
        if count_lo == count_hi:
            logger.error(f"Counts agree ({count_lo}) at both ends of {bracket}")
            raise CountsEqualAtEndpoints(f"period-{n} count is {count_lo} at both ends of {bracket}")
        while hi - lo > width_tol:
            mid = (lo + hi) / 2
            if cls._count(family, n, mid) != count_lo:
                hi = mid
            else:
                lo = mid
        return Interval(lo, hi)

    @classmethod
    def _transitions(cls, family: MapFamily, n: int, grid: CountGrid, width_tol: Fraction) -> List[Transition]:
        transitions = []
        for left, right in zip(grid.samples, grid.samples[1:]):
            if left.count == right.count:
                continue
            refined = cls.refine_transition(family, n, Interval(left.param, right.param), width_tol)
            if left.count == 0:
                kind = "birth"
            elif right.count == 0:
                kind = "death"
            else:
                kind = "change"
            transition = Transition(
                lo=float(refined.lo), hi=float(refined.hi), exact_lo=str(refined.lo), exact_hi=str(refined.hi),
                count_before=left.count, count_after=right.count, kind=kind,
            )
            EventService.publish(EventTypes.TRANSITION_REFINED, {"family": family.descriptor, "n": n, "kind": kind, "at": transition.midpoint})
            transitions.append(transition)
        return transitions

    @classmethod
    def _events_from_transitions(cls, transitions: List[Transition], point_tol: Fraction) -> List[DetectedEvent]:
        events = []
        pending: Optional[Transition] = None
        for transition in transitions:
            if transition.kind == "birth":
                if pending is not None:
                    events.append(DetectedEvent(kind="birth", lo=pending.lo, hi=pending.hi))
                pending = transition
            elif transition.kind == "death":
                if pending is None:
                    events.append(DetectedEvent(kind="death", lo=transition.lo, hi=transition.hi))
                    continue
                lo, hi = pending.midpoint, transition.midpoint
                kind = "point" if hi - lo < float(point_tol) else "bubble"
                events.append(DetectedEvent(kind=kind, lo=lo, hi=hi, count_inside=max(pending.count_after, transition.count_before)))
                pending = None
        if pending is not None:
            events.append(DetectedEvent(kind="birth", lo=pending.lo, hi=pending.hi))
        return events

    @classmethod
    def _point_candidates(
        cls, family: MapFamily, n: int, t_range: Interval, point_tol: Fraction,
    ) -> List[DetectedEvent]:
        """Certified tangent parameters inside the range whose flank counts vanish at every offset."""
        locus = PeriodService.tangent_parameters(family, n, positive_only=False)
        events = []
        for param, method in zip(locus.params, locus.methods):
            if PolyService.compare(param, t_range.lo) < 0 or PolyService.compare(param, t_range.hi) > 0:
                continue
            refined = PolyService.refine(param, min(point_tol, ENDPOINT_WIDTH))
            center = refined.isolator.midpoint
            flanks = {}
            for offset in settings.flank_offsets:
                delta = as_rational(offset)
                flanks[f"+{offset:g}"] = cls._count(family, n, center + delta)
                flanks[f"-{offset:g}"] = cls._count(family, n, center - delta)
            if any(flanks.values()):
                continue
            lo, hi = refined.isolator.as_floats()
            events.append(DetectedEvent(
                kind="point", lo=lo, hi=hi, exact_lo=refined, exact_hi=refined,
                certificates={"resultant_root": True, "double_root": method, "flank_counts": flanks},
            ))
            EventService.publish(EventTypes.POINT_DETECTED, {"family": family.descriptor, "n": n, "c": float(refined)})
        return events

    @classmethod
    def _closed_form_check(cls, family: MapFamily, n: int, report_lo: Optional[float], report_hi: Optional[float]) -> Optional[dict]:
        if family.name != FamilyName.T_FIXED_A or n not in BIRTH_PARAMETERS or family.algebraic_fixed:
            return None
        fixed = family.fixed
        closed = cls.bubble_closed_form(fixed["a"], n, fixed["b"])
        check = {"kind": closed.kind.value, "lo": closed.interval_lo, "hi": closed.interval_hi}
        if closed.kind == ReportKind.BUBBLE and report_lo is not None and report_hi is not None:
            check["max_deviation"] = max(abs(report_lo - closed.interval_lo), abs(report_hi - closed.interval_hi))
        return check

    @classmethod
    def detect(
        cls,
        family: MapFamily,
        n: int,
        t_range: Optional[Interval] = None,
        point_tol: Optional[RationalLike] = None,
        grid: Optional[int] = None,
        search_points: bool = True,
    ) -> BubbleReport:
        """
        Scan, refine and classify. Families whose fixed parameter is irrational go
        through the closed form; everything else through the exact count scan,
        with resultant-certified point bifurcations added on top.
        """
        width_tol = _tol(point_tol, settings.point_tol)
        if not family.is_exact:
            if family.name != FamilyName.T_FIXED_A:
                raise ExactnessRequired(f"{family.descriptor}: only the T family has a closed form for irrational parameters")
            fixed = family.fixed
            return cls.bubble_closed_form(fixed["a"], n, fixed["b"], point_tol=width_tol)
        if t_range is None:
            raise ValueError("a parameter range is required for the scan")

        counts = cls.scan_counts(family, n, t_range, grid or settings.scan_grid)
        transitions = cls._transitions(family, n, counts, width_tol)
        events = cls._events_from_transitions(transitions, width_tol)
        if search_points:
            known = [e for e in events if e.kind == "point"]
            for candidate in cls._point_candidates(family, n, t_range, width_tol):
                if not any(abs(candidate.center - k.center) < float(width_tol) for k in known):
                    events.append(candidate)
        events.sort(key=lambda e: e.lo)

        bubbles = [e for e in events if e.kind == "bubble"]
        points = [e for e in events if e.kind == "point"]
        primary = bubbles[0] if bubbles else (points[0] if points else None)
        if primary is None:
            kind = ReportKind.NONE
        else:
            kind = ReportKind.BUBBLE if primary.kind == "bubble" else ReportKind.POINT
        certificates = {}
        closed = cls._closed_form_check(family, n, primary.lo if primary else None, primary.hi if primary else None)
        if closed is not None:
            certificates["closed_form"] = closed
        for event in bubbles:
            EventService.publish(EventTypes.BUBBLE_DETECTED, {"family": family.descriptor, "n": n, "lo": event.lo, "hi": event.hi})
        logger.info(f"Detection for {family.descriptor}, period {n}: kind={kind.value}, {len(events)} event(s)")
        return BubbleReport(
            family=family.descriptor,
            period=n,
            kind=kind,
            interval_lo=primary.lo if primary else None,
            interval_hi=primary.hi if primary else None,
            method=DetectionMethod.SCAN,
            events=events,
            transitions=transitions,
            certificates=certificates,
            witness=counts,
        )
