from src.modules.metrics.router import *
from src.modules.metrics.schemas import *
from src.modules.metrics.service import *
