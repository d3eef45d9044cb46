"""Exception types raised by halfdisk."""


class ContractViolation(ValueError):
    """An argument violates a documented precondition (e.g. H != 1)."""


class IntegrationError(RuntimeError):
    """The numerical PMP integrator drifted off the level set H = 1."""


class NoConvergence(RuntimeError):
    """Shooting found no extremal meeting the residual tolerance.

    ``best_residual`` is the smallest residual reached; ``fallback`` holds the
    feasible three-phase plan (when one was computed) so callers can still move.
    """

    def __init__(self, message, best_residual=float("inf"), fallback=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.fallback = fallback
