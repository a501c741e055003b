from .grid import Field, Grid3, read_field, write_field
from .radial import RadialSolution, solve_concentrated_radial
from .operators import apply_operator, build_ansatz, energy_functional
from .newton import NewtonReport, newton_refine
from .analysis import Peak, PeakSet, extract_peaks, hessian_edge_eigs

__all__ = [
    "Field", "Grid3", "read_field", "write_field",
    "RadialSolution", "solve_concentrated_radial",
    "apply_operator", "build_ansatz", "energy_functional",
    "NewtonReport", "newton_refine",
    "Peak", "PeakSet", "extract_peaks", "hessian_edge_eigs",
]
