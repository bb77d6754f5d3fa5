"""Exception taxonomy shared by the library, the service, and the CLI."""


class MmwHybridError(Exception):
    """Base class for all library-specific errors."""


class ConfigError(MmwHybridError):
    """Malformed or unusable input: unknown preset, unreadable config, bad tag."""


class InfeasibleScenarioError(MmwHybridError):
    """System dimensions violate the hybrid-precoding feasibility inequalities."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericalError(MmwHybridError):
    """A numerical procedure failed at runtime (singular matrix, no convergence)."""
