"""fairsim - discrete-event exchange simulator for temporal-fairness audits."""

__version__ = "0.1.0"
__license__ = "MIT"

__all__ = ["__version__"]
