from builtins import bool, float, int, str
from typing import List
from pydantic import Field
from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    # Exact layer
    period_cap: int = Field(default=6, description="Largest period for which divisor polynomials are built")
    root_width_exponent: int = Field(default=40, description="Default isolator width is 2**-root_width_exponent")

    # Numerical continuation
    newton_tol: float = Field(default=1e-12, description="Residual accepted by Newton on x -> f^n(x) - x")
    event_tol: float = Field(default=1e-8, description="Width to which multiplier crossings are bisected")
    step0: float = Field(default=1e-3, description="Initial (and largest) natural-parameter step")
    step_floor: float = Field(default=1e-9, description="Step below which a branch terminates with a suspected fold")
    max_iter: int = Field(default=64, description="Newton iteration limit")
    derivative_floor: float = Field(default=1e-13, description="|d/dx (f^n - id)| below this aborts Newton")
    continuity_factor: float = Field(default=10.0, description="Orbit matching tolerance is factor * step * local slope, capped by match_cap")
    match_cap: float = Field(default=0.05, description="Largest accepted move of x0 between consecutive branch points")
    collapse_tol: float = Field(default=1e-7, description="Relative distance below which f^k(x0) = x0 marks a cycle of lower period")

    # Scan and detection
    point_tol: float = Field(default=1e-9, description="Transition width below which a birth/death pair is a point bifurcation")
    scan_grid: int = Field(default=2000, description="Grid points for scans started from the command line")
    scan_batch_min: int = Field(default=64, description="Grids with at least this many points are counted once per critical-parameter cell")
    flank_offsets: List[float] = Field(default=[1e-3, 1e-6], description="Offsets at which flank counts of a point bifurcation are checked")

    # Orbit diagrams
    escape_bound: float = Field(default=1e6, description="|x| above this marks an orbit as escaped")
    transient: int = Field(default=1000, description="Iterates discarded before recording")
    keep: int = Field(default=200, description="Iterates recorded per parameter")
    n_params: int = Field(default=1000, description="Parameter samples per diagram")
    svg_width: int = Field(default=800, description="Rendered diagram width in pixels")
    svg_height: int = Field(default=700, description="Rendered diagram height in pixels")

    debug: bool = Field(default=False, description="Debug mode logs every accepted continuation step")
    log_level: str = Field(default="INFO", description="Level applied to the app logger")

    class Config:
        # If your .env file is not in the root directory, adjust the path accordingly.
        env_file = ".env"
        env_file_encoding = 'utf-8'
        env_prefix = "BUBBLES_"

# Instantiate settings to be imported in your application
settings = Settings()
