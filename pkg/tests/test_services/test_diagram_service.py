from builtins import len, sorted

import pytest
from pydantic import ValidationError

from app.exceptions import EmptyDataset
from app.models.polynomial import Interval
from app.schemas.diagram_schemas import DiagramDataset, DiagramSettings
from app.services.diagram_service import DiagramService


def test_keep_one_records_first_iterate(normal_family):
    """
    Tests that transient 0 with keep 1 records f(x0), here f(0) = 1 for every alpha.
    """
    dataset = DiagramService.orbit_diagram(normal_family, (1.0, 2.0), n_params=5, transient=0, keep=1)
    assert dataset.params == [1.0, 1.25, 1.5, 1.75, 2.0]
    assert dataset.samples == [[1.0]] * 5
    assert dataset.escaped == [0] * 5


def test_fixed_seed_policy(normal_family):
    dataset = DiagramService.orbit_diagram(normal_family, (2.0, 2.0), n_params=2, transient=3, keep=4, x0_policy=0.5)
    assert dataset.samples == [[0.5] * 4, [0.5] * 4]
    assert dataset.settings.x0_policy == "fixed"
    assert dataset.settings.x0_value == 0.5


def test_superattracting_two_cycle_gives_two_bands(normal_family):
    # 0 -> 1 -> 0 under 1 - x**2
    dataset = DiagramService.orbit_diagram(normal_family, Interval(1, 1), n_params=2, transient=100, keep=20)
    assert DiagramService.count_bands(dataset.samples[0]) == 2


def test_escaped_orbits_are_counted(logistic_family):
    dataset = DiagramService.orbit_diagram(logistic_family, (4.5, 5.0), n_params=3, transient=100, keep=10)
    assert dataset.escaped == [1, 1, 1]
    assert dataset.size == 0
    with pytest.raises(EmptyDataset):
        DiagramService.render_svg(dataset)


def test_cubic_merges_both_critical_seeds(cubic_family):
    dataset = DiagramService.orbit_diagram(cubic_family, (0.0, 0.0), n_params=2, transient=0, keep=1)
    # g_0(-+sqrt(2/3)) = +-(4/3) sqrt(2/3)
    low, high = sorted(dataset.samples[0])
    assert high == pytest.approx(4 / 3 * (2 / 3) ** 0.5)
    assert low == pytest.approx(-high)
    assert len(dataset.samples[1]) == 2


@pytest.mark.parametrize("kwargs", [
    {"n_params": 1},
    {"keep": 0},
    {"transient": -1},
])
def test_orbit_diagram_rejects_settings(normal_family, kwargs):
    with pytest.raises(ValueError):
        DiagramService.orbit_diagram(normal_family, (1.0, 2.0), **kwargs)


def test_orbit_diagram_rejects_reversed_range(normal_family):
    with pytest.raises(ValueError):
        DiagramService.orbit_diagram(normal_family, (2.0, 1.0), n_params=3)


def test_bands():
    assert DiagramService.bands([1.0, 0.0, 0.0001]) == [[0.0, 0.0001], [1.0]]
    assert DiagramService.bands([]) == []


@pytest.mark.parametrize("values, expected", [
    ([0.0, 0.5, 1.0], 3),
    ([0.0, 0.0005, 0.001, 0.0015], None),
    ([], None),
    ([0.25] * 10, 1),
])
def test_count_bands(values, expected):
    assert DiagramService.count_bands(values) == expected


def test_csv_is_deterministic(t_family):
    first = DiagramService.orbit_diagram(t_family, (1.0, 1.5), n_params=20, transient=50, keep=5)
    second = DiagramService.orbit_diagram(t_family, (1.0, 1.5), n_params=20, transient=50, keep=5)
    text = DiagramService.dataset_to_csv(first)
    assert text == DiagramService.dataset_to_csv(second)
    lines = text.splitlines()
    assert lines[0] == "param,x"
    assert len(lines) == first.size + 1
    assert lines[1].startswith("1,")


def test_render_svg(normal_family):
    dataset = DiagramService.orbit_diagram(normal_family, (0.5, 2.0), n_params=30, transient=100, keep=10)
    svg = DiagramService.render_svg(dataset, width=400, height=300)
    assert svg.lstrip().startswith("<?xml")
    assert "<svg" in svg
    assert svg.rstrip().endswith("</svg>")
    assert svg == DiagramService.render_svg(dataset, width=400, height=300)


def test_dataset_length_validation():
    settings = DiagramSettings(transient=0, keep=1, escape_bound=10.0)
    with pytest.raises(ValidationError):
        DiagramDataset(family="f", param_name="t", params=[0.0, 1.0], samples=[[0.0]], escaped=[0, 0], settings=settings)


def test_settings_policy_validation():
    with pytest.raises(ValidationError):
        DiagramSettings(transient=0, keep=1, x0_policy="fixed", escape_bound=10.0)
    with pytest.raises(ValidationError):
        DiagramSettings(transient=0, keep=1, x0_policy="random", escape_bound=10.0)
    assert DiagramSettings(transient=0, keep=1, x0_policy="fixed", x0_value=0.5, escape_bound=10.0).x0_value == 0.5
