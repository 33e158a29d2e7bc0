"""Dirichlet improvability for general norms: geometry of numbers, lattice dynamics, experiments."""
from . import critical, dani, experiments, flow, hyperbolic, lattice, norms
from ._kernels import BACKEND
from .critical import critical_determinant, critical_value
from .dani import dani_transform, parse_psi
from .flow import dirichlet_hits, direct_check, trajectory_delta
from .hyperbolic import point_of_lattice, reduce
from .lattice import Lattice, delta, in_target, shortest_vector

__version__ = "0.1.0"
