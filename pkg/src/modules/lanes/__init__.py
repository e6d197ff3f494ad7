from src.modules.lanes.dataset import *
from src.modules.lanes.generator import *
from src.modules.lanes.router import *
from src.modules.lanes.schemas import *
from src.modules.lanes.service import *
