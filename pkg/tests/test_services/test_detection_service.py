from builtins import abs, all, any, enumerate, len, list, range, set, sorted, zip
from fractions import Fraction
import math

import pytest
from faker import Faker

from app.exceptions import CountsEqualAtEndpoints, ExactnessRequired
from app.models.map_family import FamilyName
from app.models.polynomial import Interval, UniPoly
from app.schemas.bubble_schemas import DetectionMethod, ReportKind
from app.services.detection_service import DetectionService, _sqrt_enclosure
from app.services.event_service import EventService, EventTypes
from app.services.family_service import FamilyService
from app.services.period_service import PeriodService
from app.services.poly_service import PolyService
from tests.conftest import fake


def _sqrt(n):
    return PolyService.isolate_real_roots(UniPoly([-n, 0, 1]))[-1]


def _closed_endpoints(a, b, alpha_star):
    root = math.sqrt(a * a - 4 * b * alpha_star)
    return (a - root) / (2 * b), (a + root) / (2 * b)


@pytest.mark.parametrize("a, n, alpha_star, count_inside", [
    ("2.658", 3, 1.75, 6),
    ("2.646", 3, 1.75, 6),
    ("2.35", 2, 0.75, 2),
])
def test_bubble_closed_form(a, n, alpha_star, count_inside):
    """
    Tests that the bubble is the set where (a - c) c exceeds the birth parameter,
    with endpoints a/2 -+ sqrt(a**2 - 4 alpha*)/2.
    """
    report = DetectionService.bubble_closed_form(a, n)
    lo, hi = _closed_endpoints(float(a), 1.0, alpha_star)
    assert report.kind == ReportKind.BUBBLE
    assert report.method == DetectionMethod.CLOSED_FORM
    assert report.interval_lo == pytest.approx(lo, abs=1e-12)
    assert report.interval_hi == pytest.approx(hi, abs=1e-12)
    assert report.certificates["count_inside"] == count_inside
    assert report.events[0].count_inside == count_inside


def test_near_point_width():
    # a = 2.646 sits just above sqrt7; the bubble narrows to sqrt(a**2 - 7)
    report = DetectionService.bubble_closed_form("2.646", 3)
    assert report.interval_hi - report.interval_lo == pytest.approx(math.sqrt(2.646 ** 2 - 7), abs=2e-12)


def test_endpoints_symmetric_about_vertex():
    report = DetectionService.bubble_closed_form(3, 3, b=Fraction(1, 2))
    lo, hi = report.events[0].exact_lo, report.events[0].exact_hi
    assert (report.interval_lo + report.interval_hi) / 2 == pytest.approx(3.0, abs=1e-12)
    assert report.certificates["endpoint_sum"] == "6"
    assert lo.isolator.lo + hi.isolator.lo <= 6 <= lo.isolator.hi + hi.isolator.hi


def test_no_bubble_below_threshold():
    report = DetectionService.bubble_closed_form(2, 3)
    assert report.kind == ReportKind.NONE
    assert report.certificates["discriminant_sign"] == -1
    assert report.interval_lo is None


def test_point_bifurcation_at_sqrt7(mocker):
    """
    Tests that a = sqrt7 gives a single point c = sqrt7/2 with no period-3
    points on either side and three at the point itself.
    """
    publish = mocker.patch.object(EventService, "publish")
    report = DetectionService.bubble_closed_form(_sqrt(7), 3)
    assert report.kind == ReportKind.POINT
    assert report.certificates["discriminant_sign"] == 0
    assert report.certificates["count_at_point"] == 3
    assert set(report.certificates["flank_counts"].values()) == {0}
    assert len(report.certificates["flank_counts"]) == 4
    assert report.interval_lo == pytest.approx(math.sqrt(7) / 2, abs=1e-9)
    assert report.interval_hi - report.interval_lo <= 1e-9
    publish.assert_called_once()
    assert publish.call_args.args[0] == EventTypes.POINT_DETECTED


def test_bubble_at_irrational_a():
    # a = 2 sqrt2: c**2 - a c + 7/4 = 0 at c = (2 sqrt2 -+ 1)/2
    report = DetectionService.bubble_closed_form(_sqrt(8), 3)
    assert report.kind == ReportKind.BUBBLE
    assert report.interval_lo == pytest.approx((math.sqrt(8) - 1) / 2, abs=1e-9)
    assert report.interval_hi == pytest.approx((math.sqrt(8) + 1) / 2, abs=1e-9)
    assert report.certificates["count_inside"] == 6


@pytest.mark.parametrize("a, n", [(3, 4), (3, 1), (0, 3), (-1, 3)])
def test_closed_form_rejects(a, n):
    with pytest.raises(ValueError):
        DetectionService.bubble_closed_form(a, n)


def test_sqrt_enclosure():
    enclosure = _sqrt_enclosure(Interval(2, 3))
    assert Fraction(14142, 10000) <= enclosure.lo
    assert enclosure.hi <= Fraction(17321, 10000)
    assert enclosure.lo * enclosure.lo <= 2
    assert enclosure.hi * enclosure.hi >= 3


def test_scan_counts_across_bubble(t_family):
    grid = DetectionService.scan_counts(t_family, 3, Interval(Fraction(1, 10), Fraction(5, 2)), 97)
    counts = grid.counts
    assert len(counts) == 97
    assert set(counts) == {0, 6}
    inside = [i for i, c in enumerate(counts) if c == 6]
    assert inside == list(range(45, 55))
    assert grid.samples[45].param == "49/40"
    assert not any(s.lower_period_flag for s in grid.samples)


def test_scan_counts_hits_fold(normal_family):
    grid = DetectionService.scan_counts(normal_family, 3, Interval(Fraction(1, 4), 2), 8)
    assert grid.counts == [0, 0, 0, 0, 0, 0, 3, 6]
    assert grid.values[6] == 1.75


def test_scan_counts_point_range(normal_family):
    grid = DetectionService.scan_counts(normal_family, 3, Interval.point(2), 50)
    assert grid.counts == [6]


def test_scan_counts_rejects_small_grid(normal_family):
    with pytest.raises(ValueError):
        DetectionService.scan_counts(normal_family, 3, Interval(1, 2), 1)




@pytest.mark.parametrize("family_fixture, n, bounds, grid", [
    ("t_family", 3, (Fraction(1, 10), Fraction(5, 2)), 97),
    ("normal_family", 3, (Fraction(1, 4), 2), 141),
    ("normal_family", 2, (Fraction(0), Fraction(3, 2)), 121),
])
def test_cell_scan_matches_point_by_point(request, family_fixture, n, bounds, grid):
    """
    Tests that counting once per critical-parameter cell gives the same counts and
    flags as counting every grid point, including grid points at 7/4 and 3/4.
    """
    family = request.getfixturevalue(family_fixture)
    t_range = Interval(*bounds)
    batched = DetectionService.scan_counts(family, n, t_range, grid, batched=True)
    single = DetectionService.scan_counts(family, n, t_range, grid, batched=False)
    assert batched.counts == single.counts
    assert [s.lower_period_flag for s in batched.samples] == [s.lower_period_flag for s in single.samples]
    assert [s.param for s in batched.samples] == [s.param for s in single.samples]


def test_cell_scan_counts_each_cell_once(normal_family, mocker):
    count = mocker.spy(PeriodService, "count_period_points")
    grid = DetectionService.scan_counts(normal_family, 3, Interval(Fraction(1, 4), 2), 2000)
    assert grid.counts[-1] == 6
    assert count.call_count < 20


def test_refine_transition_brackets_fold(normal_family):
    refined = DetectionService.refine_transition(normal_family, 3, Interval(Fraction(3, 2), 2), Fraction(1, 1000))
    assert refined.width <= Fraction(1, 1000)
    assert refined.contains(Fraction(7, 4))


def test_refine_transition_needs_differing_counts(normal_family):
    with pytest.raises(CountsEqualAtEndpoints):
        DetectionService.refine_transition(normal_family, 3, Interval(2, 3), Fraction(1, 1000))


def test_detect_scan_agrees_with_closed_form(t_family, mocker):
    publish = mocker.patch.object(EventService, "publish")
    report = DetectionService.detect(t_family, 3, Interval(Fraction(1, 10), Fraction(5, 2)), grid=97, search_points=False)
    lo, hi = _closed_endpoints(2.658, 1.0, 1.75)
    assert report.kind == ReportKind.BUBBLE
    assert report.method == DetectionMethod.SCAN
    assert abs(report.interval_lo - lo) <= 1e-9
    assert abs(report.interval_hi - hi) <= 1e-9
    assert [t.kind for t in report.transitions] == ["birth", "death"]
    assert all(t.hi - t.lo <= 1e-9 for t in report.transitions)
    assert report.certificates["closed_form"]["kind"] == "bubble"
    assert report.certificates["closed_form"]["max_deviation"] <= 1e-9
    assert report.witness.period == 3
    event_types = [call.args[0] for call in publish.call_args_list]
    assert event_types.count(EventTypes.TRANSITION_REFINED) == 2
    assert EventTypes.BUBBLE_DETECTED in event_types


def test_detect_period_two_bubble(t_family_period2):
    report = DetectionService.detect(t_family_period2, 2, Interval(Fraction(1, 5), Fraction(11, 5)), grid=41, search_points=False)
    lo, hi = _closed_endpoints(2.35, 1.0, 0.75)
    assert report.kind == ReportKind.BUBBLE
    assert abs(report.interval_lo - lo) <= 1e-9
    assert abs(report.interval_hi - hi) <= 1e-9


def test_detect_without_transitions(t_family):
    report = DetectionService.detect(t_family, 3, Interval(Fraction(1, 10), Fraction(1, 2)), grid=5, search_points=False)
    assert report.kind == ReportKind.NONE
    assert report.events == []
    assert report.interval_lo is None


def test_detect_birth_only(normal_family):
    report = DetectionService.detect(normal_family, 3, Interval(Fraction(3, 2), 2), grid=3, search_points=False)
    assert [e.kind for e in report.events] == ["birth"]
    assert report.kind == ReportKind.NONE
    assert "closed_form" not in report.certificates


def test_detect_routes_irrational_t_family_to_closed_form():
    family = FamilyService.builtin(FamilyName.T_FIXED_A, [_sqrt(7)])
    report = DetectionService.detect(family, 3)
    assert report.kind == ReportKind.POINT
    assert report.method == DetectionMethod.CLOSED_FORM


def test_detect_requires_exact_family():
    family = FamilyService.builtin(FamilyName.S_FIXED_A, [_sqrt(2)])
    with pytest.raises(ExactnessRequired):
        DetectionService.detect(family, 3, Interval(0, 2))


def test_detect_requires_range(t_family):
    with pytest.raises(ValueError):
        DetectionService.detect(t_family, 3)


@pytest.mark.slow
def test_cubic_point_pair(cubic_family):
    """
    Tests that the cubic exercise has a symmetric pair of period-3 point
    bifurcations at c = -+0.5773502692.
    """
    report = DetectionService.detect(cubic_family, 3, Interval(-2, 2), grid=41)
    points = sorted(e.center for e in report.events_of("point"))
    assert len(points) == 2
    assert abs(points[0] + points[1]) <= 1e-9
    assert points[1] == pytest.approx(0.5773502692, abs=1e-6)
    for event in report.events_of("point"):
        assert set(event.certificates["flank_counts"].values()) == {0}


def test_closed_form_bubble_agrees_with_scan_at_random_a():
    """
    Tests that for 10 random a > sqrt7 the exact scan counts 6 period-3 points strictly
    inside the closed-form bubble and none outside it.
    """
    Faker.seed(3141)
    for _ in range(10):
        a = Fraction(fake.random_int(min=2650, max=3200), 1000)
        family = FamilyService.builtin(FamilyName.T_FIXED_A, [a])
        report = DetectionService.bubble_closed_form(a, 3)
        assert report.kind == ReportKind.BUBBLE
        lo, hi = report.interval_lo, report.interval_hi
        grid = DetectionService.scan_counts(family, 3, Interval(Fraction(1, 2), Fraction(5, 2)), 81, batched=False)
        for value, count in zip(grid.values, grid.counts):
            if lo + 1e-9 < value < hi - 1e-9:
                assert count == 6
            elif value < lo - 1e-9 or value > hi + 1e-9:
                assert count == 0
