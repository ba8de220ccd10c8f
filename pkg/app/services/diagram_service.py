from builtins import classmethod, float, int, len, max, range, reversed, sorted, zip
from typing import List, Optional, Union
import csv
import io
import logging

import matplotlib
matplotlib.use("Agg")
from matplotlib.figure import Figure
import numpy as np

from app.dependencies import get_settings
from app.exceptions import EmptyDataset
from app.models.map_family import MapFamily
from app.schemas.diagram_schemas import DiagramDataset, DiagramSettings
from app.services.continuation_service import Range, range_bounds
from app.services.family_service import FamilyService

settings = get_settings()
logger = logging.getLogger(__name__)

X0Policy = Union[str, float]


class DiagramService:
    """Orbit diagrams by direct iteration, their CSV form and SVG scatter renders."""

    @classmethod
    def _seeds(cls, family: MapFamily, policy: X0Policy) -> List[float]:
        if policy == "critical-point":
            seeds = FamilyService.critical_points(family)
            if not seeds:
                raise ValueError(f"{family.descriptor} has no critical point to seed from")
            return seeds
        return [float(policy)]

    @classmethod
    def orbit_diagram(
        cls,
        family: MapFamily,
        t_range: Range,
        n_params: Optional[int] = None,
        transient: Optional[int] = None,
        keep: Optional[int] = None,
        x0_policy: X0Policy = "critical-point",
    ) -> DiagramDataset:
        """
        Iterate every parameter of an evenly spaced grid from the seed(s), drop
        ``transient`` iterates and record the next ``keep``. A seed whose orbit
        leaves [-escape_bound, escape_bound] is counted as escaped and recorded
        nowhere.
        """
        n_params = settings.n_params if n_params is None else n_params
        transient = settings.transient if transient is None else transient
        keep = settings.keep if keep is None else keep
        if n_params < 2:
            raise ValueError(f"n_params must be >= 2, got {n_params}")
        if transient < 0 or keep < 1:
            raise ValueError(f"need transient >= 0 and keep >= 1, got {transient}, {keep}")
        lo, hi = range_bounds(t_range)
        if hi < lo:
            raise ValueError(f"empty parameter range [{lo}, {hi}]")

        params = np.linspace(lo, hi, n_params)
        matrix = FamilyService.numeric_rule(family)
        coefficients = (params[:, None] ** np.arange(matrix.shape[1])) @ matrix.T
        seeds = cls._seeds(family, x0_policy)
        bound = settings.escape_bound

        x = np.repeat(np.asarray(seeds, dtype=float)[:, None], n_params, axis=1)
        alive = np.ones_like(x, dtype=bool)
        recorded = np.empty((keep, len(seeds), n_params))
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(transient + keep):
                y = np.zeros_like(x) + coefficients[:, -1]
                for k in reversed(range(coefficients.shape[1] - 1)):
                    y = y * x + coefficients[:, k]
                alive &= np.isfinite(y) & (np.abs(y) <= bound)
                x = np.where(alive, y, 0.0)
                if i >= transient:
                    recorded[i - transient] = x

        samples = []
        for j in range(n_params):
            column = []
            for s in range(len(seeds)):
                if alive[s, j]:
                    column.extend(recorded[:, s, j].tolist())
            samples.append(column)
        escaped = (~alive).sum(axis=0).tolist()
        policy = "critical-point" if x0_policy == "critical-point" else "fixed"
        dataset = DiagramDataset(
            family=family.descriptor,
            param_name=family.param_name,
            params=params.tolist(),
            samples=samples,
            escaped=escaped,
            settings=DiagramSettings(
                transient=transient, keep=keep, x0_policy=policy,
                x0_value=None if policy == "critical-point" else float(x0_policy), escape_bound=bound,
            ),
        )
        if dataset.escaped_total:
            logger.info(f"{dataset.escaped_total} orbit(s) escaped while drawing {family.descriptor}")
        return dataset

    @classmethod
    def dataset_to_csv(cls, dataset: DiagramDataset) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["param", "x"])
        for param, x in dataset.points():
            writer.writerow([f"{param:.17g}", f"{x:.17g}"])
        return buffer.getvalue()

    @classmethod
    def bands(cls, values: List[float], diameter: float = 1e-3) -> List[List[float]]:
        """Group sorted values, starting a new group at every gap wider than ``diameter``."""
        groups: List[List[float]] = []
        for v in sorted(values):
            if groups and v - groups[-1][-1] <= diameter:
                groups[-1].append(v)
            else:
                groups.append([v])
        return groups

    @classmethod
    def count_bands(cls, values: List[float], diameter: float = 1e-3) -> Optional[int]:
        """Number of clusters of diameter below ``diameter``; None when some cluster is wider."""
        groups = cls.bands(values, diameter)
        if not groups or max(g[-1] - g[0] for g in groups) >= diameter:
            return None
        return len(groups)

    @classmethod
    def render_svg(cls, dataset: DiagramDataset, width: Optional[int] = None, height: Optional[int] = None) -> str:
        """Self-contained SVG scatter of every recorded (param, x)."""
        width = settings.svg_width if width is None else width
        height = settings.svg_height if height is None else height
        if dataset.size == 0:
            logger.error(f"Nothing to plot for {dataset.family}: {dataset.escaped_total} escaped orbit(s)")
            raise EmptyDataset(f"every orbit of {dataset.family} escaped; nothing to plot")
        params, xs = zip(*dataset.points())

        dpi = 100
        with matplotlib.rc_context({"svg.hashsalt": "orbit-diagram", "svg.fonttype": "path"}):
            figure = Figure(figsize=(width / dpi, height / dpi), dpi=dpi)
            ax = figure.add_subplot()
            ax.scatter(params, xs, s=0.25, c="black", marker=".", linewidths=0)
            ax.margins(0.02)
            ax.set_xlabel(dataset.param_name)
            ax.set_ylabel("x")
            ax.set_title(dataset.family.replace(";", ", "))
            buffer = io.StringIO()
            figure.savefig(buffer, format="svg", metadata={"Date": None})
        return buffer.getvalue()
