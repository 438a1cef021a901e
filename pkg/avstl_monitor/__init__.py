import logging

from .models.base import *
from .models.signals import *
from .models.formulas import *
from .models.robustness import *
from .models.oracle import *
from .models.simulation import *
from .models.falsify import *
from .models.benchmark import *
from .exceptions import *
from .utils import *
from .config import *
from .parser import *
from .windows import *
from .refinement import *
from .robustness import *
from .oracle import *
from .generators import *
from .simulation import *
from .falsify import *
from .benchmark import *

logging.basicConfig(level=CONFIG.LOG_LEVEL)

init_sentry()
