from os import getcwd, environ
from typing import Literal
from dotenv import load_dotenv
from .models.base import BaseModel

load_dotenv(f"{getcwd()}/.env")


class Config(BaseModel):
    """Type definition for config values."""

    RELEASE: Literal["LOCAL", "STAGING", "PRODUCTION"] = "LOCAL"
    SENTRY_DSN: str = None
    #############################
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    #############################
    # numerical policy of the engine
    CROSSING_SNAP: float = 1e-12  # seconds
    AREA_RECOMPUTE_INTERVAL: int = 4096  # window slides between exact area rebuilds
    #############################
    # brute-force reference semantics
    ORACLE_REFINEMENTS: int = 20
    ORACLE_TOLERANCE: float = 1e-7
    #############################
    BENCH_MAX_RATIO: float = 2.5
    TOY_MODEL_FILE: str = None  # overrides the bundled toy model constants
    #############################
    TEST_MODE: bool = False

    def model_post_init(self, __context):
        if self.CROSSING_SNAP < 0:
            raise ValueError("CROSSING_SNAP cannot be negative")

        if self.AREA_RECOMPUTE_INTERVAL < 1:
            raise ValueError("AREA_RECOMPUTE_INTERVAL must be at least 1")

        if self.ORACLE_REFINEMENTS < 1 or self.ORACLE_TOLERANCE <= 0:
            raise ValueError(
                "ORACLE_REFINEMENTS must be >= 1 and ORACLE_TOLERANCE must be > 0")

        if self.BENCH_MAX_RATIO <= 1:
            raise ValueError("BENCH_MAX_RATIO must be greater than 1")


CONFIG: Config = Config(
    **{field: value for field, value in environ.items() if field in Config.model_fields}
)
