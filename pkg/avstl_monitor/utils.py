import enum
import math
import sentry_sdk
from .config import CONFIG


class Environment(enum.Enum):
    """Environment types."""

    LOCAL = 1
    STAGING = 2
    PRODUCTION = 3


def format_extended(value: float, digits: int = 12) -> str:
    """Format an extended real with ``digits`` significant digits, or as ``inf``/``-inf``.

    Args:
        value (float): The value to format.
        digits (int): Significant digits of finite values.

    Returns:
        str: ``20`` for 20.0, ``0.5`` for 0.5, ``-inf`` for negative infinity.
    """

    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    return f"{value + 0.0:.{digits}g}"


def get_environment() -> Environment:
    """Get whether this is local, staging or production."""

    match CONFIG.RELEASE:
        case "LOCAL":
            return Environment.LOCAL
        case "STAGING":
            return Environment.STAGING

    return Environment.PRODUCTION


def init_sentry():
    """Initialize Sentry."""

    if CONFIG.SENTRY_DSN and not CONFIG.TEST_MODE:
        sentry_sdk.init(
            environment=get_environment().name.lower(),
            dsn=CONFIG.SENTRY_DSN,
            attach_stacktrace=True
        )
