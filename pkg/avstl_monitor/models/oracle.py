from pydantic import Field

from ..config import CONFIG
from .base import BaseModel

__all__ = ("OracleConfig",)


class OracleConfig(BaseModel):
    """Convergence policy of the reference semantics.

    Attributes:
        integration_refinements (int): How many times the integration grid of
            an averaged operator may be halved before giving up.
        abs_tolerance (float): Largest difference between two successive
            integrals that counts as converged.
    """

    integration_refinements: int = Field(default_factory=lambda: CONFIG.ORACLE_REFINEMENTS, ge=1)
    abs_tolerance: float = Field(default_factory=lambda: CONFIG.ORACLE_TOLERANCE, gt=0)
