"""Exception hierarchy shared across the library.

Each exception maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class PElasticaError(Exception):
    """Base class for all library errors."""


class DomainError(PElasticaError):
    """An argument lies outside the mathematical domain of the operation."""


class NoPeriodicOrbit(DomainError):
    """The momentum parameter does not admit a periodic curvature orbit."""


class AdmissibilityError(DomainError):
    """A lobe/winding pair fails the closure admissibility window."""


class ConvergenceFailure(PElasticaError):
    """An iterative scheme exceeded its iteration or panel budget."""


class NotFound(PElasticaError):
    """A bracketed search found no sign change on its scan grid."""


class StepFailure(PElasticaError):
    """The ODE integrator underflowed its minimum step size."""


class InvariantBreach(PElasticaError):
    """A conserved quantity drifted beyond its tolerance."""


class ResolutionError(PElasticaError):
    """Sampling density is too coarse for the requested operation."""


class SeedError(PElasticaError):
    """A fiber seed point does not project onto the base point."""


class CoverOverflow(PElasticaError):
    """Closing the lift holonomy would require too many covers."""


class PoleCollision(PElasticaError):
    """A mesh vertex lies too close to the projection pole."""
