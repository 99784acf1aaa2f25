"""Grid-based approximation for covering points with unit disks under a k-coloring constraint."""
from .geometry import Point, Rect, Segment, Tolerance, UnitDisk
from .model import ColoredCover, Instance, InstanceError
from .oracle import gen_planted, min_colors_exact, verify
from .solver import CellInfeasible, SolverConfig, solve

__all__ = ["Point", "Rect", "Segment", "Tolerance", "UnitDisk", "ColoredCover", "Instance",
           "InstanceError", "gen_planted", "min_colors_exact", "verify", "CellInfeasible",
           "SolverConfig", "solve"]
__version__ = "0.1.0"
