from typing import Annotated
from pydantic import BaseModel as PydanticBaseModel, ConfigDict, Field

__all__ = ("Seconds", "BaseModel", "FrozenModel")

Seconds = Annotated[float, Field(ge=0, allow_inf_nan=False)]


class BaseModel(PydanticBaseModel):
    """Base model with a set configuration."""

    model_config = ConfigDict(populate_by_name=True, validate_assignment=True)


class FrozenModel(PydanticBaseModel):
    """Immutable, hashable value object. Signals, formulas and robustness results derive from it."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)
