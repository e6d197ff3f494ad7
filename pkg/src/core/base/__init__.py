from src.core.base.schemas import *
from src.core.base.types import *
