from builtins import abs, all, any, classmethod, float, int, isinstance, len, max, min, range, sorted, zip
from fractions import Fraction
from typing import List, Optional, Tuple, Union
import csv
import io
import logging
import math

import numpy as np
from numpy.polynomial import polynomial as P

from app.dependencies import get_settings
from app.exceptions import DerivativeNearZero, NoConvergence, StartNotConverged
from app.models.map_family import MapFamily
from app.models.polynomial import Interval, RationalLike, as_rational
from app.schemas.orbit_schemas import BifurcationEvent, EventKind, OrbitBranch, OrbitPoint, Stability
from app.services.event_service import EventService, EventTypes
from app.services.family_service import FamilyService
from app.services.period_service import PeriodService, proper_divisors
from app.services.poly_service import PolyService

settings = get_settings()
logger = logging.getLogger(__name__)

SEED_WIDTH = Fraction(1, 2 ** 60)
Range = Union[Interval, Tuple[float, float]]


class _NumericFamily:
    """Float view of a family: coefficients of f_t, f_t' and d/dt f_t at any parameter."""

    def __init__(self, family: MapFamily):
        self.family = family
        self.matrix = FamilyService.numeric_rule(family)
        self.powers = np.arange(self.matrix.shape[1])

    def at(self, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        t_powers = float(t) ** self.powers
        c = self.matrix @ t_powers
        dt_powers = np.zeros_like(t_powers)
        dt_powers[1:] = self.powers[1:] * float(t) ** (self.powers[1:] - 1)
        ct = self.matrix @ dt_powers
        return c, P.polyder(c), ct


def _orbit(numeric: _NumericFamily, n: int, t: float, x: float) -> Tuple[List[float], float, float]:
    """Iterates x_0..x_n, the multiplier prod f'(x_i) and d f^n/dt at fixed x."""
    c, dc, ct = numeric.at(t)
    xs = [x]
    multiplier, d_param = 1.0, 0.0
    for _ in range(n):
        y = xs[-1]
        slope = P.polyval(y, dc)
        d_param = P.polyval(y, ct) + slope * d_param
        multiplier *= slope
        xs.append(P.polyval(y, c))
    return xs, multiplier, d_param


def range_bounds(t_range: Range) -> Tuple[float, float]:
    if isinstance(t_range, Interval):
        return t_range.as_floats()
    lo, hi = t_range
    return float(lo), float(hi)


class ContinuationService:
    """
    Natural-parameter continuation of period-n orbits of a family, with Newton
    correction on x -> f_t^n(x) - x and fold/flip detection from the multiplier.
    """

    @classmethod
    def newton_orbit(
        cls,
        family: MapFamily,
        n: int,
        t: float,
        guess: float,
        newton_tol: Optional[float] = None,
        max_iter: Optional[int] = None,
        numeric: Optional[_NumericFamily] = None,
    ) -> OrbitPoint:
        tol = settings.newton_tol if newton_tol is None else newton_tol
        if tol <= 0:
            raise ValueError(f"newton_tol must be positive, got {tol}")
        limit = settings.max_iter if max_iter is None else max_iter
        numeric = numeric or _NumericFamily(family)
        x = float(guess)
        for _ in range(limit + 1):
            xs, multiplier, d_param = _orbit(numeric, n, t, x)
            residual = abs(xs[n] - x)
            if not math.isfinite(residual) or not math.isfinite(multiplier):
                raise NoConvergence(f"Newton diverged at {family.param_name}={t} from {guess}")
            if residual <= tol:
                tangent = -d_param / (multiplier - 1.0) if multiplier != 1.0 else math.inf
                return OrbitPoint(param=t, cycle=xs[:n], multiplier=multiplier, residual=residual, tangent=tangent)
            derivative = multiplier - 1.0
            if abs(derivative) < settings.derivative_floor:
                raise DerivativeNearZero(
                    f"|d/dx (f^{n} - id)| = {abs(derivative):.3g} at x={x} ({family.param_name}={t})"
                )
            x -= (xs[n] - x) / derivative
        raise NoConvergence(f"Newton did not reach {tol} in {limit} iterations at {family.param_name}={t}")

    @classmethod
    def classify_stability(cls, point: OrbitPoint, event_tol: Optional[float] = None) -> Stability:
        tol = settings.event_tol if event_tol is None else event_tol
        size = abs(point.multiplier)
        if size < 1 - tol:
            return Stability.ATTRACTING
        if size > 1 + tol:
            return Stability.REPELLING
        return Stability.NEUTRAL

    @classmethod
    def seed_orbits(cls, family: MapFamily, n: int, t: RationalLike) -> List[OrbitPoint]:
        """One converged orbit point per real root of phi_n at a rational anchor, ascending."""
        t = as_rational(t)
        phi_t = PeriodService.dynatomic(family, n).phi.specialize(t)
        if phi_t.degree < 1:
            return []
        numeric = _NumericFamily(family)
        seeds = []
        for root in PolyService.isolate_real_roots(phi_t, SEED_WIDTH):
            seeds.append(cls.newton_orbit(family, n, float(t), float(root.isolator.midpoint), numeric=numeric))
        return seeds

    @classmethod
    def distinct_cycles(cls, points: List[OrbitPoint], tol: float = 1e-9) -> List[OrbitPoint]:
        """Drop points whose cycle is a rotation of one already kept."""
        kept: List[OrbitPoint] = []
        for point in points:
            key = sorted(point.cycle)
            if not any(
                len(k.cycle) == len(key) and all(abs(a - b) <= tol for a, b in zip(sorted(k.cycle), key))
                for k in kept
            ):
                kept.append(point)
        return kept

    @classmethod
    def _rotate_to(cls, point: OrbitPoint, target: float) -> Tuple[OrbitPoint, float]:
        distances = [abs(x - target) for x in point.cycle]
        k = int(np.argmin(distances))
        if k == 0:
            return point, distances[0]
        cycle = point.cycle[k:] + point.cycle[:k]
        return point.model_copy(update={"cycle": cycle}), distances[k]

    @classmethod
    def _refine_crossing(
        cls, family: MapFamily, n: int, numeric: _NumericFamily, left: OrbitPoint, right: OrbitPoint, level: float,
    ) -> Tuple[float, float]:
        """Bisect the parameter until the multiplier crossing of ``level`` is bracketed within event_tol."""
        lo, hi = left, right
        while abs(hi.param - lo.param) > settings.event_tol:
            mid_t = 0.5 * (lo.param + hi.param)
            weight = (mid_t - lo.param) / (hi.param - lo.param)
            guess = lo.cycle[0] + weight * (hi.cycle[0] - lo.cycle[0])
            try:
                mid = cls.newton_orbit(family, n, mid_t, guess, numeric=numeric)
            except (NoConvergence, DerivativeNearZero):
                break
            mid, _ = cls._rotate_to(mid, guess)
            if (lo.multiplier - level) * (mid.multiplier - level) <= 0:
                hi = mid
            else:
                lo = mid
        return lo.param, hi.param

    @classmethod
    def _flip_events(
        cls, family: MapFamily, n: int, numeric: _NumericFamily, prev: OrbitPoint, new: OrbitPoint,
    ) -> List[BifurcationEvent]:
        if (prev.multiplier + 1.0) * (new.multiplier + 1.0) >= 0:
            return []
        a, b = cls._refine_crossing(family, n, numeric, prev, new, -1.0)
        event = BifurcationEvent(kind=EventKind.FLIP, param=0.5 * (a + b), period=n, bracket=(min(a, b), max(a, b)))
        EventService.publish(EventTypes.FLIP_DETECTED, {"family": family.descriptor, "n": n, "param": event.param})
        return [event]

    @classmethod
    def has_lower_period(cls, point: OrbitPoint, tol: Optional[float] = None) -> bool:
        """True when f^k(x0) = x0 for a proper divisor k of the period, i.e. the cycle collapsed."""
        tol = settings.collapse_tol if tol is None else tol
        x0 = point.cycle[0]
        return any(abs(point.cycle[k] - x0) <= tol * max(1.0, abs(x0)) for k in proper_divisors(point.period))

    @classmethod
    def _match(cls, current: OrbitPoint, candidate: OrbitPoint, predicted: float, h: float) -> Tuple[Optional[OrbitPoint], str]:
        """The accepted candidate, or None with the reason it was rejected."""
        if cls.has_lower_period(candidate):
            return None, "lower-period"
        if (current.multiplier - 1.0) * (candidate.multiplier - 1.0) < 0:
            return None, "fold-crossing"
        candidate, distance = cls._rotate_to(candidate, predicted)
        slope = current.tangent if math.isfinite(current.tangent) else 0.0
        continuity_tol = min(settings.continuity_factor * h * max(abs(slope), 1.0), settings.match_cap)
        if distance > continuity_tol:
            return None, "orbit-match-ambiguous"
        return candidate, ""

    @classmethod
    def _walk(
        cls, family: MapFamily, n: int, numeric: _NumericFamily, start: OrbitPoint, end: float, step0: float, tol: float,
    ) -> Tuple[List[OrbitPoint], List[BifurcationEvent], bool]:
        """Step from ``start`` to ``end``; returns the new points, their events and whether the walk stopped early."""
        points: List[OrbitPoint] = []
        events: List[BifurcationEvent] = []
        current = start
        direction = 1.0 if end >= start.param else -1.0
        step = step0
        reason = ""

        while (end - current.param) * direction > 0:
            h = min(step, abs(end - current.param))
            t_new = end if h == abs(end - current.param) else current.param + direction * h
            slope = current.tangent if math.isfinite(current.tangent) else 0.0
            predicted = current.cycle[0] + slope * (t_new - current.param)
            try:
                candidate = cls.newton_orbit(family, n, t_new, predicted, newton_tol=tol, numeric=numeric)
                accepted, reason = cls._match(current, candidate, predicted, h)
            except (NoConvergence, DerivativeNearZero):
                accepted, reason = None, "newton"
            if accepted is None:
                step /= 2
                if step >= settings.step_floor:
                    continue
                crossed = reason == "fold-crossing"
                event = BifurcationEvent(
                    kind=EventKind.FOLD, param=0.5 * (current.param + t_new) if crossed else current.param, period=n,
                    bracket=(min(current.param, t_new), max(current.param, t_new)),
                    suspected=not crossed, note=reason if reason in ("orbit-match-ambiguous", "lower-period") else None,
                )
                if reason == "orbit-match-ambiguous":
                    EventService.publish(EventTypes.ORBIT_MATCH_AMBIGUOUS, {"family": family.descriptor, "param": current.param})
                EventService.publish(EventTypes.FOLD_DETECTED, {"family": family.descriptor, "n": n, "param": event.param, "suspected": event.suspected})
                events.append(event)
                return points, events, True
            events.extend(cls._flip_events(family, n, numeric, current, accepted))
            points.append(accepted)
            if settings.debug:
                logger.debug(f"Accepted {family.param_name}={accepted.param:.12g} x0={accepted.cycle[0]:.12g} lambda={accepted.multiplier:.6g}")
            current = accepted
            step = min(2 * step, step0)
        return points, events, False

    @classmethod
    def continue_branch(
        cls,
        family: MapFamily,
        n: int,
        start: OrbitPoint,
        t_range: Range,
        step0: Optional[float] = None,
        newton_tol: Optional[float] = None,
    ) -> OrbitBranch:
        """
        Follow the orbit through ``start`` to both ends of ``t_range``. Failed,
        discontinuous, collapsed or fold-crossing steps halve the step; below the
        step floor that side of the branch ends with a fold event.
        """
        step0 = settings.step0 if step0 is None else step0
        if step0 <= 0:
            raise ValueError(f"step0 must be positive, got {step0}")
        tol = settings.newton_tol if newton_tol is None else newton_tol
        numeric = _NumericFamily(family)
        try:
            current = cls.newton_orbit(family, n, start.param, start.cycle[0], newton_tol=tol, numeric=numeric)
        except (NoConvergence, DerivativeNearZero) as e:
            logger.error(f"Start orbit at {family.param_name}={start.param} does not converge: {e}")
            raise StartNotConverged(f"start orbit at {start.param} does not converge") from e
        if start.residual > tol:
            raise StartNotConverged(f"start residual {start.residual:.3g} exceeds {tol}")

        branch = OrbitBranch(family=family.descriptor, period=n, points=[current])
        lo, hi = range_bounds(t_range)
        if hi <= lo:
            return branch
        down_points, down_events, down_stopped = cls._walk(family, n, numeric, current, lo, step0, tol)
        up_points, up_events, up_stopped = cls._walk(family, n, numeric, current, hi, step0, tol)
        branch.points = down_points[::-1] + [current] + up_points
        branch.events = sorted(down_events + up_events, key=lambda e: e.param)
        branch.terminated = down_stopped or up_stopped

        logger.info(
            f"Branch of period {n} for {family.descriptor}: {len(branch.points)} points, {len(branch.events)} events"
        )
        return branch

    @classmethod
    def branch_to_csv(cls, branch: OrbitBranch) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["param"] + [f"x{i}" for i in range(branch.period)] + ["multiplier", "residual", "stability"])
        for point in branch.points:
            writer.writerow(
                [f"{point.param:.17g}"]
                + [f"{x:.17g}" for x in point.cycle]
                + [f"{point.multiplier:.17g}", f"{point.residual:.17g}", cls.classify_stability(point).value]
            )
        return buffer.getvalue()
