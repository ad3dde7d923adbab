"""A workbench for brachymorphisms: maps f with f(1 + x) = 1 + f(x) and f(xy) = f(x)f(y)"""
__version__ = "0.1.0"

from .common import *
from .polycore import *
from .brachylang import *
from .finstruct import *
from .ringzoo import *
from .brachysearch import *
from .identity_suite import *
from .modelsearch import *
from .matrixlab import *
from .battery import *

__all__ = (
    common.__all__
    + polycore.__all__
    + brachylang.__all__
    + finstruct.__all__
    + ringzoo.__all__
    + brachysearch.__all__
    + identity_suite.__all__
    + modelsearch.__all__
    + matrixlab.__all__
    + battery.__all__
)
