from src.modules.network.router import *
from src.modules.network.schemas import *
from src.modules.network.service import *
