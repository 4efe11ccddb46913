from satdisco.sat.backbone import BackboneResult, Unsatisfiable, backbone
from satdisco.sat.backends import (
    Backend,
    EmbeddedBackend,
    ExternalBackend,
    MinisatBackend,
    SolveOutcome,
    SolverError,
    default_backend_name,
    make_backend,
    pysat_available,
)
from satdisco.sat.cdcl import CDCLSolver

__all__ = [
    "Backend",
    "BackboneResult",
    "CDCLSolver",
    "EmbeddedBackend",
    "ExternalBackend",
    "MinisatBackend",
    "SolveOutcome",
    "SolverError",
    "Unsatisfiable",
    "backbone",
    "default_backend_name",
    "make_backend",
    "pysat_available",
]
